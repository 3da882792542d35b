#include "aiready/evidence.hpp"

#include <algorithm>
#include <random>

#include "aiready/error.hpp"
#include "aiready/records.hpp"
#include "aiready/text.hpp"

namespace aiready {
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kFirstChunk = 64 * 1024;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t element_seed(std::uint64_t seed, std::string_view element_id) {
  std::uint64_t z = seed ^ fnv1a(element_id);
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct LoadedFile {
  Table table;
  std::uint64_t bytes = 0;
  bool truncated = false;
};

// Reads forward in growing chunks until enough rows are decoded, the byte
// allowance is spent, or the file ends. Bytes are never read twice.
LoadedFile read_table(const DataProfile& profile, const FileNode& node, std::size_t max_rows, std::uint64_t max_bytes,
                      FileReader& reader) {
  fs::path abs = fs::path(profile.root) / node.relative_path;
  std::string buf;
  std::uint64_t limit = std::min<std::uint64_t>(node.size_bytes, max_bytes);
  std::size_t chunk = kFirstChunk;
  RecordTable parsed;
  bool complete = false;
  for (;;) {
    std::uint64_t want = std::min<std::uint64_t>(chunk, limit - buf.size());
    if (want > 0) {
      std::string more = reader.read(abs, buf.size(), static_cast<std::size_t>(want));
      buf += more;
      if (more.size() < want) limit = buf.size();  // file shrank under us
    }
    complete = buf.size() >= node.size_bytes;
    parsed = parse_records(buf, node.format.format, complete, max_rows);
    if (parsed.hit_row_limit || complete || buf.size() >= limit) break;
    chunk *= 4;
  }
  LoadedFile out;
  out.bytes = buf.size();
  out.truncated = parsed.hit_row_limit || !complete;
  out.table.file = node.relative_path;
  out.table.columns = parsed.columns;
  out.table.rows = std::move(parsed.rows);
  const SchemaCue* cue = profile.find_schema(node.relative_path);
  for (const auto& name : out.table.columns) {
    const ColumnCue* c = cue ? cue->find(name) : nullptr;
    out.table.kinds.push_back(c ? c->kind : ColumnKind::text);
  }
  return out;
}

void project(Table& t, const std::vector<std::string>& wanted) {
  std::vector<std::size_t> keep;
  for (const auto& w : wanted) {
    if (auto i = t.column_index(w)) keep.push_back(*i);
  }
  Table p;
  p.file = t.file;
  for (auto i : keep) {
    p.columns.push_back(t.columns[i]);
    p.kinds.push_back(t.kinds[i]);
  }
  p.rows.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    Record nr;
    nr.reserve(keep.size());
    for (auto i : keep) nr.push_back(r[i]);
    p.rows.push_back(std::move(nr));
  }
  t = std::move(p);
}

FileStat stat_from_node(const FileNode& node, const DataProfile& profile) {
  FileStat s;
  s.relative_path = node.relative_path;
  s.format = node.format.format;
  s.size_bytes = node.size_bytes;
  s.header_fields = node.header_fields;
  if (node.read_error) {
    s.readable = false;
    s.parse_ok = false;
    s.detail = *node.read_error;
    return s;
  }
  auto positive = [&](const char* key) {
    auto it = node.header_fields.find(key);
    if (it == node.header_fields.end()) return false;
    auto v = text::parse_number(it->second);
    return v && *v > 0;
  };
  switch (node.format.format) {
    case FormatId::csv:
    case FormatId::tsv:
    case FormatId::json:
    case FormatId::jsonl:
      if (const SchemaCue* cue = profile.find_schema(node.relative_path); cue && cue->header_error) {
        s.parse_ok = false;
        s.detail = *cue->header_error;
      }
      break;
    case FormatId::png:
    case FormatId::gif:
    case FormatId::jpeg:
      s.parse_ok = positive("width") && positive("height");
      if (!s.parse_ok) s.detail = "image header lacks dimensions";
      break;
    case FormatId::fits:
      s.parse_ok = node.header_fields.count("naxis") > 0;
      if (!s.parse_ok) s.detail = "FITS header lacks NAXIS";
      break;
    case FormatId::zip:
      s.parse_ok = node.header_fields.count("zip_entries") > 0;
      if (!s.parse_ok) s.detail = "zip central directory not found";
      break;
    case FormatId::unknown:
      s.parse_ok = node.size_bytes > 0;
      if (!s.parse_ok) s.detail = "empty file";
      break;
    default:
      if (is_text_format(node.format.format) && node.header_fields.count("encoding") &&
          node.header_fields.at("encoding") == "invalid") {
        s.parse_ok = false;
        s.detail = "invalid text encoding";
      }
      break;
  }
  return s;
}

}  // namespace

std::optional<std::size_t> Table::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> Table::column(std::size_t index) const {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(index < r.size() ? r[index] : std::string());
  return out;
}

std::string Evidence::metadata_corpus() const {
  std::string out;
  for (const auto& m : metadata_texts) {
    out += text::to_lower(m.text);
    out += '\n';
  }
  return out;
}

json Evidence::summary() const {
  return json{{"tables_count", tables.size()},
              {"rows_loaded", rows_loaded},
              {"bytes_loaded", bytes_loaded},
              {"stat_files", file_stats.size()},
              {"metadata_files", metadata_texts.size()},
              {"truncated", truncated}};
}

bool is_missing_cell(std::string_view cell) {
  auto v = text::trim(cell);
  if (v.empty()) return true;
  std::string l = text::to_lower(v);
  return l == "na" || l == "n/a" || l == "null" || l == "nan";
}

Evidence load_evidence(const ElementPlan& plan, std::shared_ptr<const DataProfile> profile, FileReader& reader) {
  if (!profile) fail(ErrorCode::EvidenceLoadFailure, "no profile");
  Evidence ev;
  ev.element_id = plan.element_id;
  ev.profile = profile;
  const LoadingStrategy& ls = plan.loading;

  std::vector<const FileNode*> tabular, others, descriptors;
  for (const auto& path : ls.target_files) {
    const FileNode* node = profile->find_file(path);
    if (!node) fail(ErrorCode::EvidenceLoadFailure, "plan references a file outside the profile: " + path);
    if (node->descriptor) descriptors.push_back(node);
    else if (is_probeable_tabular(node->format.format)) tabular.push_back(node);
    else others.push_back(node);
  }

  const EvidenceClass cls = ls.evidence;
  std::uint64_t bytes_left = ls.byte_budget;

  if (cls == EvidenceClass::metadata || cls == EvidenceClass::metadata_and_tabular) {
    for (const FileNode* node : descriptors) {
      if (bytes_left == 0) {
        ev.truncated = true;
        break;
      }
      std::uint64_t want = std::min<std::uint64_t>(node->size_bytes, bytes_left);
      try {
        std::string body = reader.read(fs::path(profile->root) / node->relative_path, 0, static_cast<std::size_t>(want));
        bytes_left -= body.size();
        ev.bytes_loaded += body.size();
        if (body.size() < node->size_bytes) ev.truncated = true;
        ev.metadata_texts.push_back({node->relative_path, *node->descriptor, std::move(body)});
      } catch (const Error&) {
        // unreadable descriptors simply do not contribute text
      }
    }
  }

  // Stats come from the profile alone, so every plan gets them. A plan that
  // names no files sees the whole census.
  if (ls.target_files.empty()) {
    for (const auto& node : profile->files) ev.file_stats.push_back(stat_from_node(node, *profile));
  } else {
    for (const auto& path : ls.target_files) ev.file_stats.push_back(stat_from_node(*profile->find_file(path), *profile));
  }

  if (cls == EvidenceClass::tabular || cls == EvidenceClass::metadata_and_tabular) {
    std::vector<const FileNode*> usable;
    for (const FileNode* n : tabular) {
      const SchemaCue* cue = profile->find_schema(n->relative_path);
      if (!n->read_error && cue && !cue->header_error) usable.push_back(n);
    }
    if (usable.empty() && cls == EvidenceClass::tabular) {
      fail(ErrorCode::EvidenceLoadFailure, "no readable tabular file among the plan's target files");
    }
    const std::size_t n = usable.size();
    std::size_t failures = 0;
    if (ls.sampling == Sampling::reservoir) {
      std::mt19937_64 rng(element_seed(ls.seed, plan.element_id));
      const std::size_t k = static_cast<std::size_t>(ls.row_budget);
      std::vector<Table> tables;
      struct Slot {
        std::size_t table, row;
      };
      std::vector<Slot> reservoir;
      std::uint64_t seen = 0;
      for (const FileNode* node : usable) {
        LoadedFile lf;
        try {
          lf = read_table(*profile, *node, std::numeric_limits<std::size_t>::max(), bytes_left, reader);
        } catch (const Error&) {
          ++failures;
          continue;
        }
        bytes_left -= lf.bytes;
        ev.bytes_loaded += lf.bytes;
        ev.truncated = ev.truncated || lf.truncated;
        std::size_t t = tables.size();
        for (std::size_t r = 0; r < lf.table.rows.size(); ++r, ++seen) {
          if (reservoir.size() < k) {
            reservoir.push_back({t, r});
          } else {
            std::uniform_int_distribution<std::uint64_t> pick(0, seen);
            auto j = pick(rng);
            if (j < k) reservoir[j] = {t, r};
          }
        }
        tables.push_back(std::move(lf.table));
      }
      if (seen > k) ev.truncated = true;
      std::sort(reservoir.begin(), reservoir.end(),
                [](const Slot& a, const Slot& b) { return std::tie(a.table, a.row) < std::tie(b.table, b.row); });
      std::vector<std::vector<Record>> kept(tables.size());
      for (const auto& s : reservoir) kept[s.table].push_back(std::move(tables[s.table].rows[s.row]));
      for (std::size_t t = 0; t < tables.size(); ++t) {
        tables[t].rows = std::move(kept[t]);
        ev.rows_loaded += tables[t].rows.size();
        ev.tables.push_back(std::move(tables[t]));
      }
    } else {
      std::uint64_t rows_left = ls.row_budget;
      for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t row_quota = rows_left, byte_quota = bytes_left;
        if (ls.sampling == Sampling::stratified_by_file) {
          row_quota = ls.row_budget / n + (i < ls.row_budget % n ? 1 : 0);
          byte_quota = std::min<std::uint64_t>(bytes_left, ls.byte_budget / n);
        }
        if (row_quota == 0 || byte_quota == 0) {
          ev.truncated = true;
          continue;
        }
        LoadedFile lf;
        try {
          lf = read_table(*profile, *usable[i], static_cast<std::size_t>(row_quota), byte_quota, reader);
        } catch (const Error&) {
          ++failures;
          continue;
        }
        bytes_left -= lf.bytes;
        ev.bytes_loaded += lf.bytes;
        ev.truncated = ev.truncated || lf.truncated;
        if (ls.sampling == Sampling::head) rows_left -= lf.table.rows.size();
        ev.rows_loaded += lf.table.rows.size();
        ev.tables.push_back(std::move(lf.table));
      }
    }
    if (n > 0 && failures == n && cls == EvidenceClass::tabular) {
      fail(ErrorCode::EvidenceLoadFailure, "all target files failed to load");
    }
    if (ls.columns_of_interest) {
      for (auto& t : ev.tables) project(t, *ls.columns_of_interest);
    }
  }

  if (!ls.target_files.empty() && (cls == EvidenceClass::image || cls == EvidenceClass::files) &&
      std::none_of(ev.file_stats.begin(), ev.file_stats.end(), [](const FileStat& s) { return s.readable; })) {
    fail(ErrorCode::EvidenceLoadFailure, "all target files are unreadable");
  }
  return ev;
}

}  // namespace aiready
