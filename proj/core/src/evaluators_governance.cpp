#include <algorithm>
#include <regex>
#include <set>

#include "aiready/error.hpp"
#include "aiready/evaluators.hpp"
#include "aiready/text.hpp"

namespace aiready::detail {
namespace {

const std::set<std::string_view>& governance_ids() {
  static const std::set<std::string_view> ids{
      "persistent_identifier", "metadata_richness", "license_presence", "source_attribution", "version_info",
      "checksum_presence",     "license_clarity",   "consent_statement", "pii_risk_scan",     "dual_use_flag"};
  return ids;
}

// Lowercase spellings of licenses we consider clearly identified.
const std::vector<std::string>& known_licenses() {
  static const std::vector<std::string> l{
      "cc-by-4.0", "cc by 4.0", "cc-by-sa", "cc by-sa", "cc-by-nc", "cc by-nc", "cc0", "cc-by",
      "creative commons attribution", "creative commons zero", "public domain dedication", "pddl", "odbl",
      "open database license", "open data commons", "mit license", "apache license", "apache-2.0",
      "bsd-3-clause", "bsd-2-clause", "bsd 3-clause", "gpl-3.0", "gpl-2.0", "gnu general public license",
      "mozilla public license", "mpl-2.0", "unlicense", "cdla-permissive", "etalab open licence"};
  return l;
}

std::size_t count_matches(const std::string& s, const std::regex& re) {
  return static_cast<std::size_t>(std::distance(std::sregex_iterator(s.begin(), s.end(), re), std::sregex_iterator()));
}

std::size_t count_phrases(const std::string& corpus, const std::vector<std::string>& phrases) {
  std::size_t n = 0;
  for (const auto& p : phrases) {
    for (std::size_t pos = corpus.find(p); pos != std::string::npos; pos = corpus.find(p, pos + p.size())) ++n;
  }
  return n;
}

// Parsed JSON descriptor documents (datapackage.json and friends).
std::vector<json> descriptor_docs(const Evidence& ev) {
  std::vector<json> out;
  for (const auto& m : ev.metadata_texts) {
    if (m.kind != DescriptorKind::descriptor) continue;
    auto doc = json::parse(m.text, nullptr, false);
    if (!doc.is_discarded() && doc.is_object()) out.push_back(std::move(doc));
  }
  return out;
}

bool has_key(const std::vector<json>& docs, std::initializer_list<const char*> keys) {
  for (const auto& d : docs) {
    for (const char* k : keys) {
      if (d.contains(k) && !d[k].is_null() && !(d[k].is_string() && d[k].get<std::string>().empty())) return true;
    }
  }
  return false;
}

std::size_t descriptor_files(const Evidence& ev, DescriptorKind kind) {
  std::size_t n = 0;
  if (ev.profile) {
    for (const auto& d : ev.profile->metadata_descriptors) n += d.kind == kind ? 1 : 0;
  }
  return n;
}

RawOutput binary(bool ok, json interpretables) {
  RawOutput o;
  o.score_candidate = ok ? 1.0 : 0.0;
  o.interpretables = std::move(interpretables);
  return o;
}

std::optional<std::string> recognized_license(const std::string& corpus, const json& extra) {
  for (const auto& l : known_licenses()) {
    if (corpus.find(l) != std::string::npos) return l;
  }
  for (const auto& e : extra) {
    std::string l = text::to_lower(e.get<std::string>());
    if (!l.empty() && corpus.find(l) != std::string::npos) return l;
  }
  return std::nullopt;
}

RawOutput persistent_identifier(const Evidence& ev, const json& b) {
  static const std::regex doi(R"(\b10\.\d{4,9}/[-._;()/:a-z0-9]+)");
  static const std::regex other(R"((hdl\.handle\.net/|\bark:/?\d{5}/)[^\s]+)");
  std::string corpus = ev.metadata_corpus();
  std::size_t n = count_matches(corpus, doi) + count_matches(corpus, other);
  for (const auto& p : b["identifier_patterns"]) {
    n += count_matches(corpus, std::regex(p.get<std::string>(), std::regex::icase));
  }
  return binary(n > 0, {{"identifier_count", n}});
}

RawOutput metadata_richness(const Evidence& ev) {
  auto docs = descriptor_docs(ev);
  bool title = has_key(docs, {"title", "name"});
  bool description = has_key(docs, {"description", "abstract", "summary"});
  bool creator = has_key(docs, {"creator", "creators", "author", "authors", "contributors", "maintainer", "publisher"});
  bool date = has_key(docs, {"date", "created", "issued", "datePublished", "published", "modified", "year"});
  static const std::regex date_re(R"(\b(19|20)\d\d-\d\d-\d\d\b|\b(date|released|published|created)\b[^\n]{0,20}\b(19|20)\d\d\b)");
  static const std::regex creator_re(
      R"(\b(authors?|creators?|contributors?|maintainers?|created by|collected by|prepared by)\b)");
  static const std::regex desc_re(R"(\b(description|abstract|summary|overview)\b)");
  for (const auto& m : ev.metadata_texts) {
    if (m.kind != DescriptorKind::readme) continue;
    std::string lower = text::to_lower(m.text);
    for (auto line : text::split_lines(m.text)) {
      auto l = text::trim(line);
      if (l.size() > 2 && l[0] == '#' && l[1] == ' ') title = true;
      if (text::to_lower(l).rfind("title:", 0) == 0) title = true;
      if (text::word_tokens(l).size() >= 8 && l[0] != '#') description = true;
    }
    if (std::regex_search(lower, desc_re)) description = true;
    if (std::regex_search(lower, creator_re)) creator = true;
    if (std::regex_search(lower, date_re)) date = true;
  }
  if (descriptor_files(ev, DescriptorKind::citation) > 0) creator = true;
  std::string present;
  std::size_t found = 0;
  for (auto [name, ok] : {std::pair{"title", title}, {"description", description}, {"creator", creator}, {"date", date}}) {
    if (!ok) continue;
    ++found;
    present += (present.empty() ? "" : ",") + std::string(name);
  }
  RawOutput o;
  o.score_candidate = static_cast<double>(found) / 4.0;
  o.interpretables = {{"fields_found_count", found}, {"present_fields", present}};
  return o;
}

RawOutput license_presence(const Evidence& ev, const json& b) {
  std::size_t files = descriptor_files(ev, DescriptorKind::license);
  bool ok = files > 0 || recognized_license(ev.metadata_corpus(), b["licenses"]).has_value() ||
            has_key(descriptor_docs(ev), {"license", "licenses", "rights"});
  return binary(ok, {{"license_files", files}});
}

RawOutput license_clarity(const Evidence& ev, const json& b) {
  std::string corpus = ev.metadata_corpus();
  auto docs = descriptor_docs(ev);
  auto known = recognized_license(corpus, b["licenses"]);
  RawOutput o;
  if (known) {
    o.score_candidate = 1.0;
  } else if (descriptor_files(ev, DescriptorKind::license) > 0 || has_key(docs, {"license", "licenses", "rights"}) ||
             text::contains_phrase(text::normalize_phrase(corpus), "license") ||
             text::contains_phrase(text::normalize_phrase(corpus), "licence")) {
    o.score_candidate = 0.5;
  } else {
    o.score_candidate = 0.0;
  }
  o.interpretables = {{"recognized_license", known ? *known : std::string()}};
  return o;
}

RawOutput source_attribution(const Evidence& ev) {
  static const std::vector<std::string> phrases{
      "source:", "sources:", "collected by", "collected at", "derived from", "provided by", "obtained from",
      "originally published", "acknowledg", "funded by", "generated by", "produced by", "courtesy of",
      "please cite", "citation", "publisher"};
  std::size_t n = count_phrases(ev.metadata_corpus(), phrases);
  n += descriptor_files(ev, DescriptorKind::citation);
  if (has_key(descriptor_docs(ev), {"source", "sources", "publisher", "provenance", "creator", "creators", "author",
                                    "authors"}))
    ++n;
  return binary(n > 0, {{"attribution_mentions_count", n}});
}

RawOutput version_info(const Evidence& ev) {
  static const std::regex re(R"(\bversion\s*[:=]?\s*v?\d+(\.\d+)*\b|\bv\d+\.\d+(\.\d+)?\b|\brelease\s+\d+(\.\d+)+\b)");
  std::size_t n = count_matches(ev.metadata_corpus(), re);
  if (has_key(descriptor_docs(ev), {"version"})) ++n;
  if (ev.profile) {
    for (const auto& f : ev.profile->files) {
      std::string name = text::to_lower(std::filesystem::path(f.relative_path).filename().string());
      if (name.rfind("changelog", 0) == 0 || name.rfind("changes", 0) == 0) ++n;
    }
  }
  return binary(n > 0, {{"version_mentions_count", n}});
}

RawOutput checksum_presence(const Evidence& ev) {
  std::size_t files = descriptor_files(ev, DescriptorKind::checksum);
  bool ok = files > 0 || has_key(descriptor_docs(ev), {"md5", "sha256", "sha1", "checksum", "hash"});
  if (!ok) {
    static const std::regex re(R"(\b(md5|sha-?1|sha-?256)\b[^\n]{0,40}\b[0-9a-f]{32,64}\b)");
    ok = std::regex_search(ev.metadata_corpus(), re);
  }
  return binary(ok, {{"checksum_files", files}});
}

RawOutput consent_statement(const Evidence& ev) {
  static const std::vector<std::string> consent{
      "informed consent", "consent was obtained", "consent obtained", "written consent", "institutional review board",
      "irb approval", "irb protocol", "ethics committee", "ethical approval", "ethics approval", "approved by the ethics",
      "no human subjects", "no human participants", "does not involve human", "did not involve human",
      "no personal data"};
  static const std::vector<std::string> human{"patient", "participant", "human subject", "volunteer", "respondent",
                                              "clinical", "cohort"};
  std::string corpus = ev.metadata_corpus();
  std::size_t c = count_phrases(corpus, consent);
  std::size_t h = count_phrases(corpus, human);
  RawOutput o;
  o.score_candidate = c > 0 ? 1.0 : h > 0 ? 0.0 : 0.5;
  o.interpretables = {{"consent_mentions_count", c}, {"human_subject_mentions_count", h}};
  return o;
}

bool looks_like_pii(const std::string& cell) {
  static const std::regex email(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})");
  static const std::regex phone(R"((\+?\d{1,3}[ .-]?)?\(?\d{3}\)?[ .-]\d{3}[ .-]\d{4})");
  static const std::regex ssn(R"(\b\d{3}-\d{2}-\d{4}\b)");
  if (cell.find('@') != std::string::npos && std::regex_search(cell, email)) return true;
  auto digits = std::count_if(cell.begin(), cell.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
  if (digits < 9) return false;
  return std::regex_search(cell, ssn) || std::regex_search(cell, phone);
}

RawOutput pii_risk_scan(const Evidence& ev) {
  std::uint64_t hits = 0, scanned = 0;
  for (const auto& t : ev.tables) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      ColumnKind k = c < t.kinds.size() ? t.kinds[c] : ColumnKind::text;
      if (k == ColumnKind::numeric || k == ColumnKind::datetime) continue;
      for (const auto& r : t.rows) {
        if (is_missing_cell(r[c])) continue;
        ++scanned;
        hits += looks_like_pii(r[c]) ? 1 : 0;
      }
    }
  }
  RawOutput o;
  o.score_candidate = scanned ? static_cast<double>(hits) / static_cast<double>(scanned) : 0.0;
  o.interpretables = {{"pii_cells", hits}, {"scanned_cells", scanned}};
  return o;
}

RawOutput dual_use_flag(const Evidence& ev) {
  static const std::vector<std::string> terms{
      "pathogen", "toxin", "bioweapon", "biological weapon", "chemical weapon", "nerve agent", "explosive",
      "gain of function", "weaponiz", "enriched uranium", "select agent", "facial recognition", "mass surveillance"};
  std::string corpus = ev.metadata_corpus();
  std::string found;
  std::size_t n = 0;
  for (const auto& t : terms) {
    if (corpus.find(t) == std::string::npos) continue;
    ++n;
    found += (found.empty() ? "" : ",") + t;
  }
  RawOutput o;
  o.score_candidate = n > 0 ? 0.5 : 1.0;
  o.interpretables = {{"flagged_terms_count", n}, {"flagged_terms", found}};
  return o;
}

}  // namespace

bool is_governance_evaluator(std::string_view id) { return governance_ids().count(id) > 0; }

RawOutput run_governance(std::string_view id, const Evidence& ev, const json& b) {
  if (id == "persistent_identifier") return persistent_identifier(ev, b);
  if (id == "metadata_richness") return metadata_richness(ev);
  if (id == "license_presence") return license_presence(ev, b);
  if (id == "license_clarity") return license_clarity(ev, b);
  if (id == "source_attribution") return source_attribution(ev);
  if (id == "version_info") return version_info(ev);
  if (id == "checksum_presence") return checksum_presence(ev);
  if (id == "consent_statement") return consent_statement(ev);
  if (id == "pii_risk_scan") return pii_risk_scan(ev);
  if (id == "dual_use_flag") return dual_use_flag(ev);
  fail(ErrorCode::UnknownEvaluator, "not a governance evaluator: " + std::string(id));
}

}  // namespace aiready::detail
