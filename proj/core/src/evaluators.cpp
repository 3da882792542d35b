#include "aiready/evaluators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <regex>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "aiready/error.hpp"
#include "aiready/text.hpp"

namespace aiready {
namespace {

constexpr int kMinHashBands = 32;
constexpr std::size_t kPairwiseLimit = 2000;  // above this, LSH candidate search

using IS = InterpretableSpec;

json checklist_default() { return json::array(); }

std::vector<EvaluatorSignature> build_signatures() {
  const auto M = EvidenceClass::metadata;
  const auto MT = EvidenceClass::metadata_and_tabular;
  const auto F = EvidenceClass::files;
  const auto T = EvidenceClass::tabular;
  const ParameterSpec target_file{"target_file", "string", ""};
  const ParameterSpec target_column{"target_column", "string", ""};
  std::vector<EvaluatorSignature> s;
  auto add = [&](std::string id, EvidenceClass ev, std::vector<ParameterSpec> params, bool invert,
                 std::vector<IS> outs, std::string recipe) -> EvaluatorSignature& {
    EvaluatorSignature sig;
    sig.evaluator_id = std::move(id);
    sig.required_evidence = ev;
    sig.parameters = std::move(params);
    sig.invert = invert;
    sig.interpretables = std::move(outs);
    sig.recipe = std::move(recipe);
    s.push_back(std::move(sig));
    return s.back();
  };

  // T1
  add("persistent_identifier", M, {{"identifier_patterns", "regex_list", json::array()}}, false,
      {{"identifier_count"}}, "1 when a DOI (10.NNNN/...), handle or ARK identifier appears in descriptor text, else 0.");
  add("metadata_richness", M, {}, false, {{"fields_found_count"}, {"present_fields", false}},
      "Fraction of {title, description, creator, date} recoverable from descriptor documents.");
  add("format_standardness", F, {}, false, {{"standard_files"}, {"total_files"}},
      "Fraction of data files stored in an open, documented format (unknown and pdf are not).");
  add("license_presence", M, {{"licenses", "string_list", json::array()}}, false, {{"license_files"}},
      "1 when a license file or a recognized license identifier is present, else 0.");
  // T2
  add("source_attribution", M, {}, false, {{"attribution_mentions_count"}},
      "1 when descriptors name a source, creator, publisher or citation, else 0.");
  add("version_info", M, {}, false, {{"version_mentions_count"}},
      "1 when a version number, version key or changelog is present, else 0.");
  add("checksum_presence", M, {}, false, {{"checksum_files"}},
      "1 when a checksum manifest or digest fields are present, else 0.");
  add("license_clarity", M, {{"licenses", "string_list", json::array()}}, false,
      {{"recognized_license", false}},
      "1 for a recognized license identifier, 0.5 when license artifacts exist without one, 0 otherwise.");
  // T3
  add("consent_statement", M, {}, false, {{"consent_mentions_count"}, {"human_subject_mentions_count"}},
      "1 on a consent/ethics-approval statement or an explicit no-human-subjects statement; 0 when human "
      "subjects are mentioned without one; 0.5 when unknown.")
      .heuristic = true;
  add("pii_risk_scan", MT, {}, true, {{"pii_cells"}, {"scanned_cells"}},
      "Rate of sampled text cells matching email, phone or national-id patterns; score is one minus the rate.")
      .heuristic = true;
  add("dual_use_flag", M, {}, false, {{"flagged_terms_count"}, {"flagged_terms", false}},
      "1 unless sensitive dual-use terms appear in descriptors, then 0.5.")
      .heuristic = true;
  // Q1
  add("missing_value_rate", T, {}, true, {{"missing_cells"}, {"total_cells"}, {"per_column_rates", false}},
      "Fraction of cells that are empty or a missing sentinel (NA, N/A, null, NaN); score is one minus it.");
  add("record_integrity", F, {}, false, {{"intact_files"}, {"total_files"}},
      "Fraction of data files that are readable and whose headers parse for their format.");
  // Q2
  add("type_conformance", T, {}, false, {{"conforming_cells"}, {"checked_cells"}},
      "Fraction of non-missing cells that parse as their column's inferred kind.")
      .proxy = true;
  add("range_violation_rate", T, {{"ranges", "ranges", json::object()}}, true,
      {{"violating_cells"}, {"checked_cells"}, {"kb_columns_count"}},
      "Fraction of numeric cells outside the knowledge-base range for their variable, or outside "
      "[Q1 - 3 IQR, Q3 + 3 IQR] when none is known; score is one minus it.")
      .proxy = true;
  add("outlier_rate", T, {}, true, {{"outlier_cells"}, {"checked_cells"}},
      "Fraction of numeric cells beyond Tukey fences (1.5 IQR); score is one minus it.")
      .proxy = true;
  // Q3
  add("exact_duplicate_rate", T, {}, true, {{"duplicate_rows"}, {"total_rows"}},
      "Fraction of rows byte-identical (after trimming) to an earlier row of the same file; score is "
      "distinct rows over total rows.");
  add("near_duplicate_rate", T, {{"threshold", "number", 0.9}, {"seed", "integer", 0}}, true,
      {{"near_duplicate_rows"}, {"total_rows"}},
      "Fraction of rows whose 128-hash MinHash similarity to an earlier row reaches the threshold.");
  // Q4
  add("schema_consistency", T, {}, false, {{"consistent_files"}, {"total_files"}},
      "Fraction of tabular files sharing the most common column set.");
  add("encoding_uniformity", F, {}, false, {{"uniform_files"}, {"text_files"}},
      "Fraction of text files using the most common valid encoding (ASCII counts as UTF-8).");
  add("format_convention_consistency", F, {}, false, {{"conforming_files"}, {"total_files"}},
      "Fraction of data files using their format's most common extension spelling and newline style.");
  // AC1
  add("load_readiness", F, {}, false, {{"loadable_files"}, {"total_files"}},
      "Fraction of data files that are readable and in a format common ML loaders open directly.");
  add("split_presence", F, {}, false, {{"split_kinds_count"}},
      "1 when two or more of train/validation/test appear in paths; 0.5 for one, or a split column; else 0.");
  add("target_identifiability", F, {}, false, {{"candidate_count"}},
      "1 for a conventionally named target column, 0.5 for a heuristic target or class-per-folder images, else 0.");
  // AC2
  add("sample_scale", F, {{"n_ref", "number", 1e6}}, false, {{"n"}, {"N_ref"}},
      "min(1, log10(max(n,1)) / log10(N_ref)) with n the estimated row count, or the data file count "
      "when there is no table.");
  add("dimensionality_ratio", T, {}, false, {{"n"}, {"d"}, {"ratio"}},
      "min(1, log10(max(n/d,1)) / 2): samples per feature, saturating at 100.");
  // AC3
  add("label_balance", T, {target_file, target_column}, false,
      {{"class_counts", false}, {"majority_fraction"}, {"k"}},
      "Normalized Shannon entropy H(p)/log k of the target's class distribution; 0 when k = 1.");
  // AC4
  add("feature_target_association", T, {target_file, target_column}, false,
      {{"per_feature_nmi", false}, {"feature_count"}},
      "Maximum over features of I(X;Y)/min(H(X),H(Y)); numeric columns use 10 equal-frequency bins.");
  // AS1
  add("task_multiplicity", M, {{"templates", "templates", json::array()}}, false,
      {{"task_count"}, {"tasks", false}},
      "min(1, tasks/3) where tasks are templates whose requirements or keywords the dataset satisfies.");
  // AS2
  add("scarcity_heuristic", M, {{"rules", "rules", json::array()}}, false,
      {{"matched_rules_count"}, {"matched_keywords", false}},
      "Mean score of the scarcity keyword rules found in descriptors; 0.5 when none match.")
      .heuristic = true;
  // AS3
  add("checklist_coverage", M, {{"checklist", "checklist", checklist_default()}}, false,
      {{"matched_count"}, {"checklist_count"}, {"missing_variables", false}},
      "Fraction of checklist variables matched by a column name or descriptor phrase, synonyms included.");
  // AS4
  add("condition_range_coverage", T, {{"ranges", "ranges", json::object()}, target_file, target_column}, false,
      {{"condition_columns_count"}, {"kb_columns_count"}, {"per_column_occupancy", false}},
      "Mean fraction of 10 equal-width bins occupied per numeric condition column, over the "
      "knowledge-base range when known, else the observed range (a constant column scores 0.1).");
  return s;
}

[[noreturn]] void insufficient(ErrorCode code, const std::string& what) { fail(code, "insufficient_rows: " + what); }
[[noreturn]] void column_missing(ErrorCode code, const std::string& column) {
  fail(code, "column_missing:" + column);
}

// Key under which a column appears in per-column interpretables.
std::string column_key(const Evidence& ev, const Table& t, const std::string& column) {
  std::size_t owners = 0;
  for (const auto& other : ev.tables) {
    if (other.column_index(column)) ++owners;
  }
  return owners > 1 ? t.file + ":" + column : column;
}

std::vector<double> numeric_values(const Table& t, std::size_t col) {
  std::vector<double> out;
  for (const auto& r : t.rows) {
    if (is_missing_cell(r[col])) continue;
    if (auto v = text::parse_number(r[col])) out.push_back(*v);
  }
  return out;
}

const Table* require_tables(const Evidence& ev) {
  for (const auto& t : ev.tables) {
    if (!t.columns.empty()) return &t;
  }
  fail(ErrorCode::NoTabularEvidence, "insufficient_rows: no tabular evidence loaded");
}

std::optional<std::string> find_range_key(const json& ranges, const std::string& column) {
  std::string norm = text::normalize_phrase(column);
  for (auto it = ranges.begin(); it != ranges.end(); ++it) {
    if (text::normalize_phrase(it.key()) == norm) return it.key();
  }
  return std::nullopt;
}

struct TargetRef {
  const Table* table;
  std::size_t column;
  std::string name;
};

// Resolves the target from bindings or, failing that, the profile's first
// candidate. Throws with a column_missing detail when evidence lacks it.
TargetRef resolve_target(const Evidence& ev, const json& b, ErrorCode code) {
  std::string file = b.value("target_file", std::string());
  std::string column = b.value("target_column", std::string());
  if (column.empty() && ev.profile && !ev.profile->candidate_target_columns.empty()) {
    file = ev.profile->candidate_target_columns.front().file;
    column = ev.profile->candidate_target_columns.front().column;
  }
  if (column.empty()) fail(code, "no target column identified");
  for (const auto& t : ev.tables) {
    if (!file.empty() && t.file != file) continue;
    if (auto i = t.column_index(column)) return {&t, *i, column};
  }
  for (const auto& t : ev.tables) {
    if (auto i = t.column_index(column)) return {&t, *i, column};
  }
  column_missing(code, column);
}

bool is_identifier_like(const std::vector<std::string>& values) {
  std::unordered_set<std::string> d;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (is_missing_cell(v)) continue;
    ++n;
    d.insert(std::string(text::trim(v)));
  }
  return n > 0 && static_cast<double>(d.size()) > 0.5 * static_cast<double>(n);
}

std::vector<std::string> discretize(const std::vector<std::string>& cells, bool numeric) {
  std::vector<std::string> out(cells.size());
  if (!numeric) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out[i] = is_missing_cell(cells[i]) ? "\x01missing" : std::string(text::trim(cells[i]));
    }
    return out;
  }
  std::vector<double> vals;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::optional<double> v;
    if (!is_missing_cell(cells[i])) v = text::parse_number(cells[i]);
    if (v) {
      vals.push_back(*v);
      idx.push_back(i);
    } else {
      out[i] = "\x01missing";
    }
  }
  auto bins = stats::equal_frequency_bins(vals, 10);
  for (std::size_t j = 0; j < idx.size(); ++j) out[idx[j]] = bins[j];
  return out;
}

// --- individual evaluators -------------------------------------------------

RawOutput missing_value_rate(const Evidence& ev) {
  require_tables(ev);
  std::uint64_t missing = 0, total = 0;
  json per = json::object();
  for (const auto& t : ev.tables) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      std::uint64_t m = 0;
      for (const auto& r : t.rows) m += is_missing_cell(r[c]) ? 1 : 0;
      missing += m;
      total += t.rows.size();
      if (!t.rows.empty()) per[column_key(ev, t, t.columns[c])] = static_cast<double>(m) / static_cast<double>(t.rows.size());
    }
  }
  if (total == 0) insufficient(ErrorCode::NoTabularEvidence, "no cells loaded");
  RawOutput o;
  o.score_candidate = static_cast<double>(missing) / static_cast<double>(total);
  o.interpretables = {{"missing_cells", missing}, {"total_cells", total}, {"per_column_rates", per}};
  return o;
}

RawOutput type_conformance(const Evidence& ev) {
  require_tables(ev);
  std::uint64_t ok = 0, checked = 0;
  for (const auto& t : ev.tables) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      ColumnKind kind = c < t.kinds.size() ? t.kinds[c] : ColumnKind::text;
      for (const auto& r : t.rows) {
        if (is_missing_cell(r[c])) continue;
        ++checked;
        bool conforms = true;
        if (kind == ColumnKind::numeric) conforms = text::parse_number(r[c]).has_value();
        else if (kind == ColumnKind::datetime) conforms = text::looks_like_date(text::trim(r[c]));
        ok += conforms ? 1 : 0;
      }
    }
  }
  RawOutput o;
  o.score_candidate = checked ? static_cast<double>(ok) / static_cast<double>(checked) : 1.0;
  o.interpretables = {{"conforming_cells", ok}, {"checked_cells", checked}};
  return o;
}

RawOutput range_violation_rate(const Evidence& ev, const json& b) {
  const json& ranges = b["ranges"];
  std::uint64_t bad = 0, checked = 0, kb_cols = 0;
  bool any = false;
  for (const auto& t : ev.tables) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      if (c >= t.kinds.size() || t.kinds[c] != ColumnKind::numeric) continue;
      auto vals = numeric_values(t, c);
      if (vals.empty()) continue;
      any = true;
      double lo, hi;
      if (auto key = find_range_key(ranges, t.columns[c])) {
        lo = ranges[*key][0].get<double>();
        hi = ranges[*key][1].get<double>();
        ++kb_cols;
      } else {
        double q1 = stats::quantile(vals, 0.25), q3 = stats::quantile(vals, 0.75);
        double iqr = q3 - q1;
        lo = q1 - 3 * iqr;
        hi = q3 + 3 * iqr;
      }
      for (double v : vals) bad += (v < lo || v > hi) ? 1 : 0;
      checked += vals.size();
    }
  }
  if (!any) fail(ErrorCode::NoApplicableColumns, "no numeric column with values");
  RawOutput o;
  o.score_candidate = static_cast<double>(bad) / static_cast<double>(checked);
  o.interpretables = {{"violating_cells", bad}, {"checked_cells", checked}, {"kb_columns_count", kb_cols}};
  return o;
}

RawOutput outlier_rate(const Evidence& ev) {
  std::uint64_t bad = 0, checked = 0;
  for (const auto& t : ev.tables) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      if (c >= t.kinds.size() || t.kinds[c] != ColumnKind::numeric) continue;
      auto vals = numeric_values(t, c);
      if (vals.empty()) continue;
      double q1 = stats::quantile(vals, 0.25), q3 = stats::quantile(vals, 0.75);
      double iqr = q3 - q1;
      for (double v : vals) bad += (v < q1 - 1.5 * iqr || v > q3 + 1.5 * iqr) ? 1 : 0;
      checked += vals.size();
    }
  }
  if (checked == 0) fail(ErrorCode::NoApplicableColumns, "no numeric column with values");
  RawOutput o;
  o.score_candidate = static_cast<double>(bad) / static_cast<double>(checked);
  o.interpretables = {{"outlier_cells", bad}, {"checked_cells", checked}};
  return o;
}

std::string row_key(const Record& r) {
  json a = json::array();
  for (const auto& c : r) a.push_back(std::string(text::trim(c)));
  return a.dump();
}

RawOutput exact_duplicate_rate(const Evidence& ev) {
  require_tables(ev);
  std::uint64_t dup = 0, total = 0;
  for (const auto& t : ev.tables) {
    std::unordered_set<std::string> seen;
    for (const auto& r : t.rows) {
      if (!seen.insert(row_key(r)).second) ++dup;
    }
    total += t.rows.size();
  }
  if (total == 0) insufficient(ErrorCode::NoTabularEvidence, "no rows loaded");
  RawOutput o;
  o.score_candidate = static_cast<double>(dup) / static_cast<double>(total);
  o.interpretables = {{"duplicate_rows", dup}, {"total_rows", total}};
  return o;
}

RawOutput near_duplicate_rate(const Evidence& ev, const json& b) {
  require_tables(ev);
  double threshold = b["threshold"].get<double>();
  auto seed = b["seed"].get<std::uint64_t>();
  std::uint64_t flagged = 0, total = 0;
  for (const auto& t : ev.tables) {
    std::vector<std::vector<std::string>> sets;
    sets.reserve(t.rows.size());
    for (const auto& r : t.rows) sets.push_back(stats::row_tokens(t.columns, r));
    auto flags = stats::near_duplicate_flags(sets, threshold, seed);
    flagged += static_cast<std::uint64_t>(std::count(flags.begin(), flags.end(), true));
    total += t.rows.size();
  }
  if (total == 0) insufficient(ErrorCode::NoTabularEvidence, "no rows loaded");
  RawOutput o;
  o.score_candidate = static_cast<double>(flagged) / static_cast<double>(total);
  o.interpretables = {{"near_duplicate_rows", flagged}, {"total_rows", total}};
  return o;
}

RawOutput schema_consistency(const Evidence& ev) {
  if (!ev.profile) fail(ErrorCode::NoTabularEvidence, "no profile");
  std::map<std::string, std::size_t> groups;
  std::size_t total = 0;
  for (const auto& cue : ev.profile->schema_cues) {
    ++total;
    if (cue.header_error) continue;
    std::vector<std::string> names;
    for (const auto& c : cue.columns) names.push_back(c.name);
    std::sort(names.begin(), names.end());
    groups[json(names).dump()]++;
  }
  if (total == 0) fail(ErrorCode::NoTabularEvidence, "no tabular files in profile");
  std::size_t modal = 0;
  for (const auto& [k, n] : groups) modal = std::max(modal, n);
  RawOutput o;
  o.score_candidate = static_cast<double>(modal) / static_cast<double>(total);
  o.interpretables = {{"consistent_files", modal}, {"total_files", total}};
  return o;
}

std::vector<const FileStat*> data_stats(const Evidence& ev) {
  std::vector<const FileStat*> out;
  for (const auto& s : ev.file_stats) out.push_back(&s);
  return out;
}

RawOutput fraction_of_files(const Evidence& ev, const char* good_name, const std::function<bool(const FileStat&)>& good) {
  auto stats = data_stats(ev);
  std::size_t ok = 0;
  for (const auto* s : stats) ok += good(*s) ? 1 : 0;
  RawOutput o;
  o.score_candidate = stats.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(stats.size());
  o.interpretables = {{good_name, ok}, {"total_files", stats.size()}};
  return o;
}

bool open_standard(FormatId f) { return f != FormatId::unknown && f != FormatId::pdf; }

RawOutput encoding_uniformity(const Evidence& ev) {
  std::map<std::string, std::size_t> counts;
  std::size_t text_files = 0;
  auto consider = [&](const std::map<std::string, std::string>& fields) {
    auto it = fields.find("encoding");
    if (it == fields.end()) return;
    ++text_files;
    std::string enc = it->second == "ascii" ? "utf8" : it->second;
    if (enc != "invalid") counts[enc]++;
  };
  for (const auto& s : ev.file_stats) consider(s.header_fields);
  if (ev.profile) {
    for (const auto& f : ev.profile->files) {
      if (f.descriptor) consider(f.header_fields);
    }
  }
  std::size_t modal = 0;
  for (const auto& [k, n] : counts) modal = std::max(modal, n);
  RawOutput o;
  o.score_candidate = text_files ? static_cast<double>(modal) / static_cast<double>(text_files) : 1.0;
  o.interpretables = {{"uniform_files", modal}, {"text_files", text_files}};
  return o;
}

std::string modal_value(const std::map<std::string, std::size_t>& counts) {
  std::string best;
  std::size_t n = 0;
  for (const auto& [k, c] : counts) {
    if (c > n) {
      best = k;
      n = c;
    }
  }
  return best;
}

RawOutput format_convention_consistency(const Evidence& ev) {
  std::map<FormatId, std::map<std::string, std::size_t>> exts, newlines;
  for (const auto& s : ev.file_stats) {
    exts[s.format][std::filesystem::path(s.relative_path).extension().string()]++;
    auto nl = s.header_fields.find("newline");
    if (nl != s.header_fields.end() && nl->second != "none") newlines[s.format][nl->second]++;
  }
  std::size_t ok = 0;
  for (const auto& s : ev.file_stats) {
    bool good = std::filesystem::path(s.relative_path).extension().string() == modal_value(exts[s.format]);
    auto nl = s.header_fields.find("newline");
    if (nl != s.header_fields.end() && nl->second != "none") good = good && nl->second == modal_value(newlines[s.format]);
    ok += good ? 1 : 0;
  }
  RawOutput o;
  o.score_candidate = ev.file_stats.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(ev.file_stats.size());
  o.interpretables = {{"conforming_files", ok}, {"total_files", ev.file_stats.size()}};
  return o;
}

std::optional<std::string> split_kind(const std::string& token) {
  if (token == "train" || token == "training") return "train";
  if (token == "test" || token == "testing") return "test";
  if (token == "val" || token == "valid" || token == "validation" || token == "dev") return "validation";
  return std::nullopt;
}

RawOutput split_presence(const Evidence& ev) {
  std::set<std::string> kinds;
  bool split_column = false;
  if (ev.profile) {
    for (const auto& f : ev.profile->files) {
      if (f.descriptor) continue;
      for (const auto& tok : text::word_tokens(f.relative_path)) {
        if (auto k = split_kind(tok)) kinds.insert(*k);
      }
    }
    for (const auto& cue : ev.profile->schema_cues) {
      for (const auto& c : cue.columns) {
        std::string n = text::to_lower(c.name);
        if (n == "split" || n == "fold" || n == "subset" || n == "partition") split_column = true;
      }
    }
  }
  RawOutput o;
  o.score_candidate = kinds.size() >= 2 ? 1.0 : (kinds.size() == 1 || split_column) ? 0.5 : 0.0;
  o.interpretables = {{"split_kinds_count", kinds.size()}};
  return o;
}

RawOutput target_identifiability(const Evidence& ev) {
  static const std::set<std::string> kNames{"label", "target", "class", "y", "outcome"};
  double score = 0.0;
  std::size_t candidates = 0;
  if (ev.profile) {
    candidates = ev.profile->candidate_target_columns.size();
    for (const auto& t : ev.profile->candidate_target_columns) {
      score = std::max(score, kNames.count(text::to_lower(t.column)) ? 1.0 : 0.5);
    }
    if (score < 0.5) {
      std::set<std::string> folders;
      bool at_root = false;
      for (const auto* f : image_files(*ev.profile)) {
        auto parent = std::filesystem::path(f->relative_path).parent_path().generic_string();
        if (parent.empty()) at_root = true;
        else folders.insert(parent);
      }
      if (folders.size() >= 2 && !at_root) {
        score = 0.5;
        candidates = folders.size();
      }
    }
  }
  RawOutput o;
  o.score_candidate = score;
  o.interpretables = {{"candidate_count", candidates}};
  return o;
}

std::uint64_t estimated_rows(const DataProfile& p) {
  std::uint64_t n = 0;
  for (const auto& cue : p.schema_cues) {
    if (!cue.header_error) n += cue.estimated_rows;
  }
  return n;
}

RawOutput sample_scale(const Evidence& ev, const json& b) {
  double n_ref = b["n_ref"].get<double>();
  if (!(n_ref > 1.0)) fail(ErrorCode::InvalidBinding, "n_ref must exceed 1");
  std::uint64_t n = 0;
  if (ev.profile) {
    n = has_tabular_evidence(*ev.profile) ? estimated_rows(*ev.profile) : ev.profile->data_files().size();
  }
  RawOutput o;
  o.score_candidate = stats::sample_scale(static_cast<double>(n), n_ref);
  o.interpretables = {{"n", n}, {"N_ref", n_ref}};
  return o;
}

RawOutput dimensionality_ratio(const Evidence& ev) {
  if (!ev.profile || !has_tabular_evidence(*ev.profile)) fail(ErrorCode::NoTabularEvidence, "no tabular files");
  std::uint64_t n = estimated_rows(*ev.profile);
  std::size_t d = 0;
  for (const auto& cue : ev.profile->schema_cues) {
    if (cue.header_error) continue;
    std::size_t features = cue.columns.size();
    for (const auto& t : ev.profile->candidate_target_columns) {
      if (t.file == cue.relative_path && features > 1) --features;
    }
    d = std::max(d, features);
  }
  d = std::max<std::size_t>(d, 1);
  double r = static_cast<double>(n) / static_cast<double>(d);
  RawOutput o;
  o.score_candidate = std::min(1.0, std::log10(std::max(r, 1.0)) / 2.0);
  o.interpretables = {{"n", n}, {"d", d}, {"ratio", r}};
  return o;
}

RawOutput label_balance(const Evidence& ev, const json& b) {
  TargetRef t = resolve_target(ev, b, ErrorCode::NotCategorical);
  std::vector<std::string> labels;
  for (const auto& r : t.table->rows) {
    if (!is_missing_cell(r[t.column])) labels.emplace_back(text::trim(r[t.column]));
  }
  if (labels.empty()) insufficient(ErrorCode::NotCategorical, "target column has no values");
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels) counts[l]++;
  ColumnKind kind = t.column < t.table->kinds.size() ? t.table->kinds[t.column] : ColumnKind::text;
  bool integer_like = std::all_of(labels.begin(), labels.end(), [](const std::string& v) { return text::is_integer_text(v); });
  bool categorical = kind == ColumnKind::categorical ||
                     (kind == ColumnKind::numeric && integer_like && counts.size() <= 20) ||
                     (kind != ColumnKind::numeric && counts.size() <= std::max<std::size_t>(20, labels.size() / 2));
  if (!categorical) fail(ErrorCode::NotCategorical, "target '" + t.name + "' is not categorical");
  std::size_t majority = 0;
  for (const auto& [k, c] : counts) majority = std::max(majority, c);
  RawOutput o;
  o.score_candidate = stats::normalized_entropy(labels);
  o.interpretables = {{"class_counts", counts},
                      {"majority_fraction", static_cast<double>(majority) / static_cast<double>(labels.size())},
                      {"k", counts.size()}};
  return o;
}

RawOutput feature_target_association(const Evidence& ev, const json& b) {
  TargetRef t = resolve_target(ev, b, ErrorCode::NoTarget);
  const Table& table = *t.table;
  // Rows with a missing target carry no information about association.
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (!is_missing_cell(table.rows[r][t.column])) keep.push_back(r);
  }
  if (keep.empty()) insufficient(ErrorCode::NoTarget, "target column has no values");
  auto take = [&](std::size_t col) {
    std::vector<std::string> v;
    v.reserve(keep.size());
    for (auto r : keep) v.push_back(table.rows[r][col]);
    return v;
  };
  auto kind_of = [&](std::size_t col) { return col < table.kinds.size() ? table.kinds[col] : ColumnKind::text; };
  auto target_cells = take(t.column);
  std::set<std::string> target_distinct;
  for (const auto& v : target_cells) target_distinct.insert(std::string(text::trim(v)));
  bool bin_target = kind_of(t.column) == ColumnKind::numeric && target_distinct.size() > 20;
  auto y = discretize(target_cells, bin_target);

  json per = json::object();
  double best = 0.0;
  std::size_t features = 0;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c == t.column) continue;
    auto cells = take(c);
    ColumnKind k = kind_of(c);
    if (k != ColumnKind::numeric && is_identifier_like(cells)) continue;
    if (std::all_of(cells.begin(), cells.end(), [](const std::string& v) { return is_missing_cell(v); })) continue;
    double nmi = stats::normalized_mutual_information(discretize(cells, k == ColumnKind::numeric), y);
    per[table.columns[c]] = nmi;
    best = std::max(best, nmi);
    ++features;
  }
  if (features == 0) fail(ErrorCode::NoFeatures, "no usable feature columns besides the target");
  RawOutput o;
  o.score_candidate = best;
  o.interpretables = {{"per_feature_nmi", per}, {"feature_count", features}};
  return o;
}

struct TaskContext {
  bool categorical_target = false, numeric_target = false, image = false, tabular = false;
  bool numeric_features = false, datetime = false, text_column = false, multiple_files = false;
  std::string corpus;  // normalized metadata
};

bool requirement_met(const TaskContext& c, const std::string& req) {
  if (req == "categorical_target") return c.categorical_target;
  if (req == "numeric_target") return c.numeric_target;
  if (req == "image") return c.image;
  if (req == "tabular") return c.tabular;
  if (req == "numeric_features") return c.numeric_features;
  if (req == "datetime") return c.datetime;
  if (req == "text_column") return c.text_column;
  if (req == "multiple_files") return c.multiple_files;
  return false;
}

const json& default_templates() {
  static const json t = json::parse(R"([
    {"task": "classification", "requires": ["tabular", "categorical_target"], "keywords": ["classification"]},
    {"task": "regression", "requires": ["tabular", "numeric_target"], "keywords": ["regression"]},
    {"task": "clustering", "requires": ["tabular", "numeric_features"], "keywords": ["clustering"]},
    {"task": "forecasting", "requires": ["datetime", "numeric_features"], "keywords": ["forecasting", "time series"]},
    {"task": "image_analysis", "requires": ["image"], "keywords": ["segmentation", "object detection"]},
    {"task": "anomaly_detection", "requires": [], "keywords": ["anomaly", "anomalies"]},
    {"task": "text_mining", "requires": ["text_column"], "keywords": ["text mining", "language model"]}
  ])");
  return t;
}

RawOutput task_multiplicity(const Evidence& ev, const json& b) {
  TaskContext c;
  c.corpus = text::normalize_phrase(ev.metadata_corpus());
  if (ev.profile) {
    const DataProfile& p = *ev.profile;
    c.tabular = has_tabular_evidence(p);
    c.image = !image_files(p).empty();
    c.numeric_features = has_numeric_features(p);
    c.multiple_files = p.data_files().size() > 1;
    if (has_identified_target(p)) {
      c.categorical_target = target_is_categorical(p);
      const ColumnCue* t = target_column_cue(p, p.candidate_target_columns.front());
      c.numeric_target = t && t->kind == ColumnKind::numeric && !c.categorical_target;
    }
    for (const auto& cue : p.schema_cues) {
      for (const auto& col : cue.columns) {
        c.datetime = c.datetime || col.kind == ColumnKind::datetime;
        c.text_column = c.text_column || col.kind == ColumnKind::text;
      }
    }
  }
  const json& templates = b["templates"].empty() ? default_templates() : b["templates"];
  std::set<std::string> tasks;
  for (const auto& t : templates) {
    const auto& reqs = t.contains("requires") ? t["requires"] : json::array();
    bool met = !reqs.empty() &&
               std::all_of(reqs.begin(), reqs.end(), [&](const json& r) { return requirement_met(c, r.get<std::string>()); });
    if (!met && t.contains("keywords")) {
      for (const auto& k : t["keywords"]) {
        if (text::contains_phrase(c.corpus, text::normalize_phrase(k.get<std::string>()))) met = true;
      }
    }
    if (met) tasks.insert(t["task"].get<std::string>());
  }
  std::string names;
  for (const auto& t : tasks) names += (names.empty() ? "" : ",") + t;
  RawOutput o;
  o.score_candidate = std::min(1.0, static_cast<double>(tasks.size()) / 3.0);
  o.interpretables = {{"task_count", tasks.size()}, {"tasks", names}};
  return o;
}

const json& default_scarcity_rules() {
  static const json r = json::parse(R"([
    {"keyword": "rare", "score": 0.8},
    {"keyword": "scarce", "score": 0.8},
    {"keyword": "first of its kind", "score": 0.9},
    {"keyword": "unique", "score": 0.7},
    {"keyword": "long term", "score": 0.8},
    {"keyword": "field campaign", "score": 0.8},
    {"keyword": "expensive", "score": 0.7},
    {"keyword": "hard to obtain", "score": 0.8},
    {"keyword": "synthetic", "score": 0.3},
    {"keyword": "simulated", "score": 0.3},
    {"keyword": "benchmark", "score": 0.4}
  ])");
  return r;
}

RawOutput scarcity_heuristic(const Evidence& ev, const json& b) {
  std::string corpus = text::normalize_phrase(ev.metadata_corpus());
  const json& rules = b["rules"].empty() ? default_scarcity_rules() : b["rules"];
  double sum = 0;
  std::size_t matched = 0;
  std::string words;
  for (const auto& r : rules) {
    std::string kw = r["keyword"].get<std::string>();
    if (text::contains_phrase(corpus, text::normalize_phrase(kw))) {
      sum += r["score"].get<double>();
      ++matched;
      words += (words.empty() ? "" : ",") + kw;
    }
  }
  RawOutput o;
  o.score_candidate = matched ? sum / static_cast<double>(matched) : 0.5;
  o.interpretables = {{"matched_rules_count", matched}, {"matched_keywords", words}};
  return o;
}

RawOutput checklist_coverage(const Evidence& ev, const json& b) {
  const json& checklist = b["checklist"];
  if (checklist.empty()) fail(ErrorCode::EmptyChecklist, "checklist is empty");
  std::vector<std::string> columns;
  if (ev.profile) {
    for (const auto& cue : ev.profile->schema_cues) {
      for (const auto& c : cue.columns) columns.push_back(text::normalize_phrase(c.name));
    }
  }
  for (const auto& t : ev.tables) {
    for (const auto& c : t.columns) columns.push_back(text::normalize_phrase(c));
  }
  std::string corpus = text::normalize_phrase(ev.metadata_corpus());
  std::size_t matched = 0;
  std::string missing;
  for (const auto& var : checklist) {
    std::vector<std::string> names{var["name"].get<std::string>()};
    if (var.contains("synonyms")) {
      for (const auto& s : var["synonyms"]) names.push_back(s.get<std::string>());
    }
    bool found = false;
    for (const auto& n : names) {
      std::string phrase = text::normalize_phrase(n);
      if (phrase.empty()) continue;
      for (const auto& col : columns) found = found || text::contains_phrase(col, phrase);
      found = found || text::contains_phrase(corpus, phrase);
    }
    if (found) ++matched;
    else missing += (missing.empty() ? "" : ",") + names.front();
  }
  RawOutput o;
  o.score_candidate = static_cast<double>(matched) / static_cast<double>(checklist.size());
  o.interpretables = {{"matched_count", matched}, {"checklist_count", checklist.size()}, {"missing_variables", missing}};
  return o;
}

RawOutput condition_range_coverage(const Evidence& ev, const json& b) {
  const json& ranges = b["ranges"];
  std::string target = b.value("target_column", std::string());
  if (target.empty() && ev.profile && !ev.profile->candidate_target_columns.empty()) {
    target = ev.profile->candidate_target_columns.front().column;
  }
  json per = json::object();
  double sum = 0;
  std::size_t cols = 0, kb_cols = 0;
  for (const auto& t : ev.tables) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      if (c >= t.kinds.size() || t.kinds[c] != ColumnKind::numeric || t.columns[c] == target) continue;
      auto vals = numeric_values(t, c);
      if (vals.empty()) continue;
      double occ;
      if (auto key = find_range_key(ranges, t.columns[c])) {
        occ = stats::bin_occupancy(vals, ranges[*key][0].get<double>(), ranges[*key][1].get<double>());
        ++kb_cols;
      } else {
        auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
        occ = stats::bin_occupancy(vals, *lo, *hi);
      }
      per[column_key(ev, t, t.columns[c])] = occ;
      sum += occ;
      ++cols;
    }
  }
  if (cols == 0) fail(ErrorCode::NoConditionVariables, "no numeric condition columns");
  RawOutput o;
  o.score_candidate = sum / static_cast<double>(cols);
  o.interpretables = {{"condition_columns_count", cols}, {"kb_columns_count", kb_cols}, {"per_column_occupancy", per}};
  return o;
}

bool check_param(const ParameterSpec& p, const json& v) {
  const std::string& t = p.type;
  if (t == "number") return v.is_number() && std::isfinite(v.get<double>());
  if (t == "integer") return v.is_number_integer() || v.is_number_unsigned();
  if (t == "string") return v.is_string();
  if (t == "string_list" || t == "regex_list") {
    if (!v.is_array()) return false;
    for (const auto& s : v) {
      if (!s.is_string()) return false;
      if (t == "regex_list") {
        try {
          std::regex re(s.get<std::string>());
        } catch (const std::regex_error&) {
          return false;
        }
      }
    }
    return true;
  }
  if (t == "checklist") {
    if (!v.is_array()) return false;
    for (const auto& e : v) {
      if (!e.is_object() || !e.contains("name") || !e["name"].is_string()) return false;
      if (e.contains("synonyms")) {
        if (!e["synonyms"].is_array()) return false;
        for (const auto& s : e["synonyms"]) {
          if (!s.is_string()) return false;
        }
      }
    }
    return true;
  }
  if (t == "ranges") {
    if (!v.is_object()) return false;
    for (const auto& [k, r] : v.items()) {
      if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) return false;
      if (r[0].get<double>() > r[1].get<double>()) return false;
    }
    return true;
  }
  if (t == "rules") {
    if (!v.is_array()) return false;
    for (const auto& r : v) {
      if (!r.is_object() || !r.contains("keyword") || !r["keyword"].is_string() || !r.contains("score") ||
          !r["score"].is_number())
        return false;
      double s = r["score"].get<double>();
      if (s < 0 || s > 1) return false;
    }
    return true;
  }
  if (t == "templates") {
    if (!v.is_array()) return false;
    for (const auto& r : v) {
      if (!r.is_object() || !r.contains("task") || !r["task"].is_string()) return false;
      for (const char* key : {"requires", "keywords"}) {
        if (!r.contains(key)) continue;
        if (!r[key].is_array()) return false;
        for (const auto& s : r[key]) {
          if (!s.is_string()) return false;
        }
      }
    }
    return true;
  }
  return false;
}

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix(s);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::vector<std::string> EvaluatorSignature::required_interpretables() const {
  std::vector<std::string> out;
  for (const auto& i : interpretables) {
    if (i.required) out.push_back(i.name);
  }
  return out;
}

const std::vector<EvaluatorSignature>& evaluator_signatures() {
  static const std::vector<EvaluatorSignature> sigs = build_signatures();
  return sigs;
}

const EvaluatorSignature* find_signature(std::string_view id) {
  for (const auto& s : evaluator_signatures()) {
    if (s.evaluator_id == id) return &s;
  }
  return nullptr;
}

bool is_builtin_evaluator(std::string_view id) { return find_signature(id) != nullptr; }

json evaluator_annex() {
  json annex = json::object();
  for (const auto& s : evaluator_signatures()) {
    json params = json::object();
    for (const auto& p : s.parameters) params[p.name] = {{"type", p.type}, {"default", p.default_value}};
    json outs = json::array();
    for (const auto& i : s.interpretables) outs.push_back({{"name", i.name}, {"required", i.required}});
    annex[s.evaluator_id] = {{"required_evidence", to_string(s.required_evidence)},
                             {"parameters", params},
                             {"output", {{"raw_range", {s.raw_min, s.raw_max}}, {"invert", s.invert}, {"interpretables", outs}}},
                             {"heuristic", s.heuristic},
                             {"proxy", s.proxy},
                             {"recipe", s.recipe}};
  }
  return annex;
}

void validate_bindings(const EvaluatorSignature& sig, const json& bindings) {
  if (bindings.is_null()) return;
  if (!bindings.is_object()) fail(ErrorCode::InvalidBinding, sig.evaluator_id + ": bindings must be an object");
  for (const auto& [name, value] : bindings.items()) {
    auto it = std::find_if(sig.parameters.begin(), sig.parameters.end(), [&](const ParameterSpec& p) { return p.name == name; });
    if (it == sig.parameters.end()) fail(ErrorCode::InvalidBinding, sig.evaluator_id + ": unknown parameter '" + name + "'");
    if (!check_param(*it, value)) {
      fail(ErrorCode::InvalidBinding, sig.evaluator_id + ": parameter '" + name + "' is not a valid " + it->type);
    }
  }
}

json resolve_bindings(const EvaluatorSignature& sig, const json& bindings) {
  validate_bindings(sig, bindings);
  json out = json::object();
  for (const auto& p : sig.parameters) out[p.name] = p.default_value;
  if (bindings.is_object()) {
    for (const auto& [k, v] : bindings.items()) out[k] = v;
  }
  return out;
}

RawOutput run_evaluator(std::string_view id, const Evidence& ev, const json& bindings) {
  const EvaluatorSignature* sig = find_signature(id);
  if (!sig) fail(ErrorCode::UnknownEvaluator, "unknown evaluator '" + std::string(id) + "'");
  json b = resolve_bindings(*sig, bindings);
  RawOutput o;
  if (detail::is_governance_evaluator(id)) {
    o = detail::run_governance(id, ev, b);
  } else if (id == "missing_value_rate") {
    o = missing_value_rate(ev);
  } else if (id == "record_integrity") {
    o = fraction_of_files(ev, "intact_files", [](const FileStat& s) { return s.readable && s.parse_ok; });
  } else if (id == "type_conformance") {
    o = type_conformance(ev);
  } else if (id == "range_violation_rate") {
    o = range_violation_rate(ev, b);
  } else if (id == "outlier_rate") {
    o = outlier_rate(ev);
  } else if (id == "exact_duplicate_rate") {
    o = exact_duplicate_rate(ev);
  } else if (id == "near_duplicate_rate") {
    o = near_duplicate_rate(ev, b);
  } else if (id == "schema_consistency") {
    o = schema_consistency(ev);
  } else if (id == "encoding_uniformity") {
    o = encoding_uniformity(ev);
  } else if (id == "format_convention_consistency") {
    o = format_convention_consistency(ev);
  } else if (id == "format_standardness") {
    o = fraction_of_files(ev, "standard_files", [](const FileStat& s) { return open_standard(s.format); });
  } else if (id == "load_readiness") {
    o = fraction_of_files(ev, "loadable_files", [](const FileStat& s) { return s.readable && is_ml_loadable(s.format); });
  } else if (id == "split_presence") {
    o = split_presence(ev);
  } else if (id == "target_identifiability") {
    o = target_identifiability(ev);
  } else if (id == "sample_scale") {
    o = sample_scale(ev, b);
  } else if (id == "dimensionality_ratio") {
    o = dimensionality_ratio(ev);
  } else if (id == "label_balance") {
    o = label_balance(ev, b);
  } else if (id == "feature_target_association") {
    o = feature_target_association(ev, b);
  } else if (id == "task_multiplicity") {
    o = task_multiplicity(ev, b);
  } else if (id == "scarcity_heuristic") {
    o = scarcity_heuristic(ev, b);
  } else if (id == "checklist_coverage") {
    o = checklist_coverage(ev, b);
  } else if (id == "condition_range_coverage") {
    o = condition_range_coverage(ev, b);
  } else {
    fail(ErrorCode::UnknownEvaluator, "no implementation for '" + std::string(id) + "'");
  }
  o.evidence_summary = ev.summary();
  return o;
}

namespace stats {

double entropy_bits(const std::map<std::string, std::size_t>& counts) {
  std::size_t n = 0;
  for (const auto& [k, c] : counts) n += c;
  if (n == 0) return 0.0;
  double h = 0;
  for (const auto& [k, c] : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

double normalized_entropy(const std::vector<std::string>& labels) {
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels) counts[l]++;
  if (counts.size() <= 1) return 0.0;
  double h = entropy_bits(counts) / std::log2(static_cast<double>(counts.size()));
  return std::clamp(h, 0.0, 1.0);
}

double normalized_mutual_information(const std::vector<std::string>& x, const std::vector<std::string>& y) {
  if (x.size() != y.size()) fail(ErrorCode::InvalidBinding, "feature and target lengths differ");
  std::map<std::string, std::size_t> cx, cy;
  std::map<std::pair<std::string, std::string>, std::size_t> cxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cx[x[i]]++;
    cy[y[i]]++;
    cxy[{x[i], y[i]}]++;
  }
  double hx = entropy_bits(cx), hy = entropy_bits(cy);
  double m = std::min(hx, hy);
  if (m <= 0.0) return 0.0;
  const double n = static_cast<double>(x.size());
  double mi = 0;
  for (const auto& [k, c] : cxy) {
    double pxy = static_cast<double>(c) / n;
    double px = static_cast<double>(cx[k.first]) / n, py = static_cast<double>(cy[k.second]) / n;
    mi += pxy * std::log2(pxy / (px * py));
  }
  return std::clamp(mi / m, 0.0, 1.0);
}

std::vector<std::string> equal_frequency_bins(const std::vector<double>& values, int bins) {
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(values.size());
  std::vector<std::string> out;
  out.reserve(values.size());
  for (double v : values) {
    auto less = static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
    int b = std::min(bins - 1, static_cast<int>(std::floor(bins * less / n)));
    out.push_back("b" + std::to_string(b));
  }
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double h = (static_cast<double>(values.size()) - 1.0) * q;
  auto lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double bin_occupancy(const std::vector<double>& values, double lo, double hi, int bins) {
  if (values.empty() || bins <= 0) return 0.0;
  if (!(hi > lo)) {
    bool any = std::any_of(values.begin(), values.end(), [&](double v) { return v == lo; });
    return any ? 1.0 / bins : 0.0;
  }
  std::vector<bool> hit(static_cast<std::size_t>(bins), false);
  for (double v : values) {
    if (v < lo || v > hi) continue;
    int b = std::min(bins - 1, static_cast<int>(std::floor((v - lo) / (hi - lo) * bins)));
    hit[static_cast<std::size_t>(b)] = true;
  }
  return static_cast<double>(std::count(hit.begin(), hit.end(), true)) / bins;
}

std::vector<std::string> row_tokens(const std::vector<std::string>& columns, const Record& row) {
  std::set<std::string> toks;
  for (std::size_t c = 0; c < row.size() && c < columns.size(); ++c) {
    if (is_missing_cell(row[c])) continue;
    for (const auto& w : text::word_tokens(row[c])) toks.insert(columns[c] + ":" + w);
  }
  return {toks.begin(), toks.end()};
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  return static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
}

Signature minhash(const std::vector<std::string>& tokens, std::uint64_t seed, int hashes) {
  Signature sig(static_cast<std::size_t>(hashes), std::numeric_limits<std::uint64_t>::max());
  std::vector<std::uint64_t> salts(sig.size());
  std::uint64_t state = seed;
  for (auto& s : salts) s = splitmix(state);
  for (const auto& t : tokens) {
    std::uint64_t base = fnv1a(t);
    for (std::size_t i = 0; i < sig.size(); ++i) sig[i] = std::min(sig[i], mix(base ^ salts[i]));
  }
  return sig;
}

double signature_similarity(const Signature& a, const Signature& b) {
  if (a.size() != b.size() || a.empty()) return 0.0;
  std::size_t eq = 0;
  for (std::size_t i = 0; i < a.size(); ++i) eq += a[i] == b[i] ? 1 : 0;
  return static_cast<double>(eq) / static_cast<double>(a.size());
}

std::vector<bool> near_duplicate_flags(const std::vector<std::vector<std::string>>& token_sets, double threshold,
                                       std::uint64_t seed) {
  const std::size_t n = token_sets.size();
  std::vector<Signature> sigs;
  sigs.reserve(n);
  for (const auto& t : token_sets) sigs.push_back(minhash(t, seed));
  std::vector<bool> flags(n, false);
  if (n <= kPairwiseLimit) {
    for (std::size_t i = 1; i < n; ++i) {
      for (std::size_t j = 0; j < i && !flags[i]; ++j) {
        if (signature_similarity(sigs[i], sigs[j]) >= threshold) flags[i] = true;
      }
    }
    return flags;
  }
  const std::size_t rows = sigs.front().size() / kMinHashBands;
  std::vector<std::unordered_map<std::uint64_t, std::vector<std::size_t>>> buckets(kMinHashBands);
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::size_t> candidates;
    std::vector<std::uint64_t> keys(kMinHashBands);
    for (int b = 0; b < kMinHashBands; ++b) {
      std::uint64_t h = 1469598103934665603ull;
      for (std::size_t r = 0; r < rows; ++r) h = mix(h ^ sigs[i][static_cast<std::size_t>(b) * rows + r]);
      keys[static_cast<std::size_t>(b)] = h;
      auto it = buckets[static_cast<std::size_t>(b)].find(h);
      if (it != buckets[static_cast<std::size_t>(b)].end()) candidates.insert(it->second.begin(), it->second.end());
    }
    for (auto j : candidates) {
      if (signature_similarity(sigs[i], sigs[j]) >= threshold) {
        flags[i] = true;
        break;
      }
    }
    for (int b = 0; b < kMinHashBands; ++b) buckets[static_cast<std::size_t>(b)][keys[static_cast<std::size_t>(b)]].push_back(i);
  }
  return flags;
}

double sample_scale(double n, double n_ref) {
  return std::clamp(std::log10(std::max(n, 1.0)) / std::log10(n_ref), 0.0, 1.0);
}

}  // namespace stats
}  // namespace aiready
