#include "aiready/inspector.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <set>
#include <thread>
#include <unordered_set>

#include "aiready/delimited.hpp"
#include "aiready/error.hpp"
#include "aiready/records.hpp"
#include "aiready/text.hpp"

namespace aiready {
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kHeadBytes = 512;
constexpr double kKindThreshold = 0.95;
constexpr double kCategoricalRatio = 0.5;
constexpr std::size_t kSmallSampleDistinct = 10;
constexpr double kTargetCardinalityRatio = 0.1;
constexpr double kModalityShare = 0.10;
constexpr std::size_t kCategoricalTargetMaxDistinct = 20;

std::uint16_t be16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>((static_cast<unsigned char>(b[at]) << 8) |
                                    static_cast<unsigned char>(b[at + 1]));
}
std::uint16_t le16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    (static_cast<unsigned char>(b[at + 1]) << 8));
}
std::uint32_t be32(std::string_view b, std::size_t at) {
  return (std::uint32_t{static_cast<unsigned char>(b[at])} << 24) |
         (std::uint32_t{static_cast<unsigned char>(b[at + 1])} << 16) |
         (std::uint32_t{static_cast<unsigned char>(b[at + 2])} << 8) |
         std::uint32_t{static_cast<unsigned char>(b[at + 3])};
}
std::uint32_t le32(std::string_view b, std::size_t at) {
  return std::uint32_t{static_cast<unsigned char>(b[at])} |
         (std::uint32_t{static_cast<unsigned char>(b[at + 1])} << 8) |
         (std::uint32_t{static_cast<unsigned char>(b[at + 2])} << 16) |
         (std::uint32_t{static_cast<unsigned char>(b[at + 3])} << 24);
}

bool needs_extended_probe(FormatId f) {
  return is_text_format(f) || f == FormatId::fits || f == FormatId::jpeg || f == FormatId::unknown;
}

void image_header_fields(FileNode& node) {
  std::string_view h = node.header_excerpt;
  switch (node.format.format) {
    case FormatId::png:
      if (h.size() >= 24 && h.substr(12, 4) == "IHDR") {
        node.header_fields["width"] = std::to_string(be32(h, 16));
        node.header_fields["height"] = std::to_string(be32(h, 20));
      }
      break;
    case FormatId::gif:
      if (h.size() >= 10) {
        node.header_fields["width"] = std::to_string(le16(h, 6));
        node.header_fields["height"] = std::to_string(le16(h, 8));
      }
      break;
    case FormatId::jpeg: {
      std::size_t i = 2;
      while (i + 9 < h.size()) {
        if (static_cast<unsigned char>(h[i]) != 0xFF) break;
        auto marker = static_cast<unsigned char>(h[i + 1]);
        if (marker == 0xFF) {
          ++i;
          continue;
        }
        std::uint16_t len = be16(h, i + 2);
        bool sof = marker >= 0xC0 && marker <= 0xCF && marker != 0xC4 && marker != 0xC8 && marker != 0xCC;
        if (sof) {
          node.header_fields["height"] = std::to_string(be16(h, i + 5));
          node.header_fields["width"] = std::to_string(be16(h, i + 7));
          break;
        }
        if (len < 2) break;
        i += 2 + len;
      }
      break;
    }
    case FormatId::fits: {
      // 80-character cards, keyword in columns 1-8.
      for (std::size_t off = 0; off + 80 <= h.size(); off += 80) {
        std::string_view card = h.substr(off, 80);
        std::string key(text::trim(card.substr(0, 8)));
        if (key == "END") break;
        if (key == "BITPIX" || key == "NAXIS" || key == "NAXIS1" || key == "NAXIS2") {
          auto value = card.substr(10);
          auto slash = value.find('/');
          node.header_fields[text::to_lower(key)] = std::string(text::trim(value.substr(0, slash)));
        }
      }
      break;
    }
    default: break;
  }
}

void text_header_fields(FileNode& node) {
  std::string_view h = node.header_excerpt;
  std::string encoding;
  if (h.size() >= 3 && h.substr(0, 3) == "\xEF\xBB\xBF") {
    encoding = "utf8_bom";
  } else if (h.size() >= 2 && (h.substr(0, 2) == "\xFF\xFE" || h.substr(0, 2) == "\xFE\xFF")) {
    encoding = "utf16";
  } else if (std::all_of(h.begin(), h.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; })) {
    encoding = "ascii";
  } else {
    encoding = text::valid_utf8(h, node.header_excerpt.size() < node.size_bytes) ? "utf8" : "invalid";
  }
  std::size_t crlf = 0, lf = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i] == '\n') {
      if (i > 0 && h[i - 1] == '\r') ++crlf;
      else ++lf;
    }
  }
  node.header_fields["encoding"] = encoding;
  node.header_fields["newline"] = crlf && lf ? "mixed" : crlf ? "crlf" : lf ? "lf" : "none";
}

void zip_listing(FileNode& node, std::string_view tail, std::uint64_t tail_offset) {
  // End of central directory record, searched backwards.
  if (tail.size() < 22) return;
  for (std::size_t i = tail.size() - 22 + 1; i-- > 0;) {
    if (le32(tail, i) != 0x06054b50) continue;
    std::uint16_t entries = le16(tail, i + 10);
    std::uint32_t cd_size = le32(tail, i + 12);
    std::uint32_t cd_offset = le32(tail, i + 16);
    node.header_fields["zip_entries"] = std::to_string(entries);
    if (cd_offset < tail_offset || cd_offset + cd_size > tail_offset + tail.size()) return;
    std::size_t p = cd_offset - tail_offset;
    std::string names;
    for (std::uint16_t e = 0; e < entries && e < 16 && p + 46 <= tail.size(); ++e) {
      if (le32(tail, p) != 0x02014b50) break;
      std::uint16_t name_len = le16(tail, p + 28);
      std::uint16_t extra_len = le16(tail, p + 30);
      std::uint16_t comment_len = le16(tail, p + 32);
      if (p + 46 + name_len > tail.size()) break;
      if (!names.empty()) names += ';';
      names += tail.substr(p + 46, name_len);
      p += 46 + name_len + extra_len + comment_len;
    }
    node.header_fields["zip_names"] = names;
    return;
  }
}

void probe_node(FileNode& node, const fs::path& abs, const ScanLimits& limits, FileReader& reader) {
  try {
    std::size_t head_len = static_cast<std::size_t>(std::min<std::uint64_t>(node.size_bytes, std::min(kHeadBytes, limits.probe_bytes)));
    node.header_excerpt = reader.read(abs, 0, head_len);
    node.format = detect_format(node.header_excerpt, node.extension());
    std::size_t budget_left = limits.probe_bytes - node.header_excerpt.size();
    std::uint64_t remaining = node.size_bytes - node.header_excerpt.size();
    if (needs_extended_probe(node.format.format) && budget_left > 0 && remaining > 0 &&
        node.header_excerpt.size() == head_len) {
      node.header_excerpt += reader.read(abs, node.header_excerpt.size(),
                                         static_cast<std::size_t>(std::min<std::uint64_t>(budget_left, remaining)));
    } else if (node.format.format == FormatId::zip && budget_left > 0 && remaining > 0) {
      std::size_t tail_len = static_cast<std::size_t>(std::min<std::uint64_t>(budget_left, remaining));
      std::uint64_t tail_offset = node.size_bytes - tail_len;
      std::string tail = reader.read(abs, tail_offset, tail_len);
      zip_listing(node, tail, tail_offset);
    }
    if (node.format.format == FormatId::unknown && node.format.confidence == Confidence::content_sniff) {
      node.format = detect_format(node.header_excerpt, node.extension());
    }
    if (is_text_format(node.format.format)) text_header_fields(node);
    image_header_fields(node);
  } catch (const Error& e) {
    node.read_error = e.what();
    node.header_excerpt.clear();
    node.format = detect_format({}, node.extension());
  } catch (const std::exception& e) {
    node.read_error = e.what();
    node.header_excerpt.clear();
    node.format = detect_format({}, node.extension());
  }
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

ColumnCue infer_column(const std::string& name, const std::vector<Record>& rows, std::size_t col) {
  ColumnCue cue;
  cue.name = name;
  std::size_t numeric = 0, dates = 0, integers = 0;
  bool short_tokens = true;
  std::unordered_set<std::string> distinct;
  for (const auto& row : rows) {
    std::string_view v = text::trim(row[col]);
    if (v.empty()) continue;
    std::string lower = text::to_lower(v);
    if (lower == "na" || lower == "n/a" || lower == "null" || lower == "nan") continue;
    ++cue.non_empty;
    distinct.emplace(v);
    if (text::parse_number(v)) {
      ++numeric;
      if (text::is_integer_text(v)) ++integers;
    }
    if (text::looks_like_date(v)) ++dates;
    if (v.size() > 32 || v.find_first_of(" \t") != std::string_view::npos) short_tokens = false;
  }
  cue.distinct = distinct.size();
  if (cue.non_empty == 0) {
    cue.kind = ColumnKind::text;
    return cue;
  }
  auto n = static_cast<double>(cue.non_empty);
  cue.integer_valued = integers == cue.non_empty;
  if (static_cast<double>(numeric) >= kKindThreshold * n) {
    cue.kind = ColumnKind::numeric;
  } else if (static_cast<double>(dates) >= kKindThreshold * n) {
    cue.kind = ColumnKind::datetime;
  } else if (static_cast<double>(cue.distinct) <= kCategoricalRatio * n ||
             (cue.distinct <= kSmallSampleDistinct && short_tokens)) {
    cue.kind = ColumnKind::categorical;
  } else {
    cue.kind = ColumnKind::text;
  }
  return cue;
}

bool is_categorical_target(const ColumnCue& c) {
  if (c.kind == ColumnKind::categorical) return true;
  return c.kind == ColumnKind::numeric && c.integer_valued && c.distinct <= kCategoricalTargetMaxDistinct;
}

// Most specific first; a file with several matches lists them in this order.
const std::vector<std::string>& target_names() {
  static const std::vector<std::string> names{"label", "target", "class", "outcome", "y"};
  return names;
}

}  // namespace

std::string_view to_string(ColumnKind k) {
  switch (k) {
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::text: return "text";
    case ColumnKind::datetime: return "datetime";
  }
  return "text";
}

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::tabular: return "tabular";
    case Modality::image: return "image";
    case Modality::sequence_text: return "sequence_text";
    case Modality::multimodal: return "multimodal";
    case Modality::unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(DescriptorKind k) {
  switch (k) {
    case DescriptorKind::readme: return "readme";
    case DescriptorKind::license: return "license";
    case DescriptorKind::citation: return "citation";
    case DescriptorKind::checksum: return "checksum";
    case DescriptorKind::descriptor: return "descriptor";
  }
  return "readme";
}

std::optional<ColumnKind> column_kind_from_string(std::string_view s) {
  for (auto k : {ColumnKind::numeric, ColumnKind::categorical, ColumnKind::text, ColumnKind::datetime}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<Modality> modality_from_string(std::string_view s) {
  for (auto m : {Modality::tabular, Modality::image, Modality::sequence_text, Modality::multimodal, Modality::unknown}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::string FileNode::extension() const {
  return fs::path(relative_path).extension().string();
}

const ColumnCue* SchemaCue::find(std::string_view column) const {
  for (const auto& c : columns) {
    if (c.name == column) return &c;
  }
  return nullptr;
}

const FileNode* DataProfile::find_file(std::string_view relative_path) const {
  auto it = std::lower_bound(files.begin(), files.end(), relative_path,
                             [](const FileNode& f, std::string_view p) { return f.relative_path < p; });
  return it != files.end() && it->relative_path == relative_path ? &*it : nullptr;
}

const SchemaCue* DataProfile::find_schema(std::string_view relative_path) const {
  for (const auto& s : schema_cues) {
    if (s.relative_path == relative_path) return &s;
  }
  return nullptr;
}

std::vector<const FileNode*> DataProfile::data_files() const {
  std::vector<const FileNode*> out;
  for (const auto& f : files) {
    if (!f.descriptor) out.push_back(&f);
  }
  return out;
}

std::optional<DescriptorKind> descriptor_kind(std::string_view relative_path) {
  fs::path p(relative_path);
  std::string name = text::to_lower(p.filename().string());
  std::string stem = text::to_lower(p.stem().string());
  std::string ext = text::to_lower(p.extension().string());
  if (stem.rfind("readme", 0) == 0) return DescriptorKind::readme;
  if (stem.rfind("license", 0) == 0 || stem.rfind("licence", 0) == 0 || stem.rfind("copying", 0) == 0) {
    return DescriptorKind::license;
  }
  if (stem.rfind("citation", 0) == 0 || ext == ".bib") return DescriptorKind::citation;
  if (stem.rfind("checksum", 0) == 0 || stem.rfind("md5sum", 0) == 0 || stem.rfind("sha256sum", 0) == 0 ||
      stem.rfind("sha1sum", 0) == 0 || stem.rfind("manifest-md5", 0) == 0 ||
      stem.rfind("manifest-sha", 0) == 0 || ext == ".md5" || ext == ".sha256" || ext == ".sha1") {
    return DescriptorKind::checksum;
  }
  static const std::set<std::string> kDescriptorNames{
      "datapackage.json", "dataset_description.json", "dataset.json", "metadata.json",
      "metadata.yaml",    "metadata.yml",             "croissant.json", "codemeta.json",
      "dataset_info.json", ".zenodo.json",            "datacite.json",  "datacite.xml"};
  if (kDescriptorNames.count(name)) return DescriptorKind::descriptor;
  return std::nullopt;
}

TreeScan scan_tree(const fs::path& root, const ScanLimits& limits, FileReader& reader) {
  std::error_code ec;
  auto status = fs::status(root, ec);
  if (ec || !fs::exists(status)) fail(ErrorCode::RootNotFound, "dataset root not found: " + root.string());
  if (!fs::is_directory(status)) fail(ErrorCode::RootNotFound, "dataset root is not a directory: " + root.string());

  struct Entry {
    std::string rel;
    std::uint64_t size;
  };
  std::vector<Entry> entries;
  std::vector<std::pair<fs::path, std::size_t>> stack{{root, 0}};
  while (!stack.empty()) {
    auto [dir, depth] = stack.back();
    stack.pop_back();
    fs::directory_iterator it(dir, fs::directory_options::none, ec);
    if (ec) {
      if (dir == root) fail(ErrorCode::PermissionDenied, "cannot list " + root.string() + ": " + ec.message());
      continue;
    }
    for (const auto& de : it) {
      std::error_code sec;
      auto st = de.symlink_status(sec);
      if (sec || fs::is_symlink(st)) continue;
      if (fs::is_directory(st)) {
        if (depth + 1 < limits.max_depth) stack.emplace_back(de.path(), depth + 1);
        continue;
      }
      if (!fs::is_regular_file(st)) continue;
      std::uint64_t size = de.file_size(sec);
      entries.push_back({fs::relative(de.path(), root, sec).generic_string(), sec ? 0 : size});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.rel < b.rel; });

  TreeScan scan;
  if (entries.size() > limits.max_files) {
    entries.resize(limits.max_files);
    scan.truncated = true;
  }
  scan.files.resize(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    scan.files[i].relative_path = entries[i].rel;
    scan.files[i].size_bytes = entries[i].size;
    scan.files[i].descriptor = descriptor_kind(entries[i].rel);
  }
  parallel_for(scan.files.size(), limits.workers, [&](std::size_t i) {
    probe_node(scan.files[i], root / scan.files[i].relative_path, limits, reader);
  });
  return scan;
}

SchemaCue probe_schema(const FileNode& file, const ScanLimits& limits) {
  SchemaCue cue;
  cue.relative_path = file.relative_path;
  if (!is_probeable_tabular(file.format.format)) {
    fail(ErrorCode::UnparsableHeader,
         file.relative_path + ": format " + std::string(to_string(file.format.format)) + " is not tabular text");
  }
  if (file.read_error) fail(ErrorCode::UnparsableHeader, file.relative_path + ": unreadable");
  const bool complete = file.header_excerpt.size() >= file.size_bytes;
  cue.fully_probed = complete;
  RecordTable table;
  try {
    table = parse_records(file.header_excerpt, file.format.format, complete, limits.probe_rows);
  } catch (const Error& e) {
    fail(ErrorCode::UnparsableHeader, file.relative_path + ": " + e.what());
  }
  cue.delimiter = table.delimiter;
  for (std::size_t c = 0; c < table.columns.size(); ++c) cue.columns.push_back(infer_column(table.columns[c], table.rows, c));
  cue.probed_rows = table.rows.size();
  if (complete && !table.hit_row_limit) {
    cue.estimated_rows = table.rows.size();
  } else if (table.consumed > table.header_bytes && !table.rows.empty()) {
    double per_row = static_cast<double>(table.consumed - table.header_bytes) / static_cast<double>(table.rows.size());
    double body = static_cast<double>(file.size_bytes - std::min<std::uint64_t>(table.header_bytes, file.size_bytes));
    cue.estimated_rows = std::max<std::uint64_t>(table.rows.size(), static_cast<std::uint64_t>(body / per_row + 0.5));
  } else {
    cue.estimated_rows = table.rows.size();
  }
  return cue;
}

DataProfile build_profile(const fs::path& root, const ProfileOptions& options, FileReader& reader) {
  DataProfile profile;
  profile.root = root.lexically_normal().generic_string();
  TreeScan scan = scan_tree(root, options.limits, reader);
  profile.files = std::move(scan.files);
  profile.truncated = scan.truncated;

  for (const auto& f : profile.files) {
    profile.total_bytes += f.size_bytes;
    if (f.descriptor) profile.metadata_descriptors.push_back({*f.descriptor, f.relative_path});
  }

  // Schema cues for every probeable tabular data file.
  for (const auto& f : profile.files) {
    if (f.descriptor || !is_probeable_tabular(f.format.format)) continue;
    try {
      SchemaCue cue = probe_schema(f, options.limits);
      profile.primary_structured_files.push_back(f.relative_path);
      profile.schema_cues.push_back(std::move(cue));
    } catch (const Error& e) {
      SchemaCue cue;
      cue.relative_path = f.relative_path;
      cue.header_error = e.what();
      profile.schema_cues.push_back(std::move(cue));
    }
  }

  // Target heuristic: name match, else the sole low-cardinality categorical column.
  for (const auto& cue : profile.schema_cues) {
    if (cue.header_error) continue;
    bool named = false;
    for (const auto& want : target_names()) {
      for (const auto& c : cue.columns) {
        if (text::to_lower(c.name) == want) {
          profile.candidate_target_columns.push_back({cue.relative_path, c.name});
          named = true;
        }
      }
    }
    if (named) continue;
    const ColumnCue* sole = nullptr;
    std::size_t categorical = 0;
    for (const auto& c : cue.columns) {
      if (c.kind == ColumnKind::categorical) {
        ++categorical;
        sole = &c;
      }
    }
    if (categorical == 1 && cue.probed_rows > 0 &&
        static_cast<double>(sole->distinct) <= kTargetCardinalityRatio * static_cast<double>(cue.probed_rows)) {
      profile.candidate_target_columns.push_back({cue.relative_path, sole->name});
    }
  }

  // Modality census over data files.
  std::map<FormatFamily, std::pair<std::size_t, std::uint64_t>> census;
  std::size_t data_count = 0;
  std::uint64_t data_bytes = 0;
  for (const auto* f : profile.data_files()) {
    ++data_count;
    data_bytes += f->size_bytes;
    auto fam = family_of(f->format.format);
    if (fam == FormatFamily::other) continue;
    census[fam].first += 1;
    census[fam].second += f->size_bytes;
  }
  std::vector<FormatFamily> present;
  for (auto [fam, stat] : census) {
    bool by_count = static_cast<double>(stat.first) >= kModalityShare * static_cast<double>(data_count);
    bool by_bytes = data_bytes > 0 && static_cast<double>(stat.second) >= kModalityShare * static_cast<double>(data_bytes);
    if (by_count || by_bytes) present.push_back(fam);
  }
  if (present.size() >= 2) {
    profile.modality = Modality::multimodal;
  } else if (present.size() == 1) {
    switch (present.front()) {
      case FormatFamily::tabular: profile.modality = Modality::tabular; break;
      case FormatFamily::image: profile.modality = Modality::image; break;
      case FormatFamily::sequence_text: profile.modality = Modality::sequence_text; break;
      default: profile.modality = Modality::unknown; break;
    }
  }

  // Domain hint from descriptor documents or a "Domain:" line in a readme.
  if (options.domain_override) {
    profile.domain_hint = text::to_lower(*options.domain_override);
  } else {
    for (const auto& f : profile.files) {
      if (!f.descriptor || profile.domain_hint) continue;
      if (f.descriptor == DescriptorKind::descriptor && f.format.format == FormatId::json) {
        auto doc = json::parse(f.header_excerpt, nullptr, false);
        if (!doc.is_discarded() && doc.is_object()) {
          for (const char* key : {"domain", "subject", "discipline"}) {
            if (doc.contains(key) && doc[key].is_string()) {
              profile.domain_hint = text::to_lower(text::trim(doc[key].get<std::string>()));
              break;
            }
          }
        }
      } else if (f.descriptor == DescriptorKind::readme) {
        for (auto line : text::split_lines(f.header_excerpt)) {
          auto l = text::trim(line);
          while (!l.empty() && (l.front() == '*' || l.front() == '-' || l.front() == '#')) l = text::trim(l.substr(1));
          std::string lower = text::to_lower(l);
          if (lower.rfind("domain:", 0) == 0 || lower.rfind("domain**:", 0) == 0) {
            auto value = l.substr(l.find(':') + 1);
            std::string v(text::trim(value));
            v.erase(std::remove(v.begin(), v.end(), '*'), v.end());
            if (!v.empty()) profile.domain_hint = text::to_lower(text::trim(v));
            break;
          }
        }
      }
    }
  }
  return profile;
}

json profile_to_json(const DataProfile& p) {
  json files = json::array();
  for (const auto& f : p.files) {
    json node{{"relative_path", f.relative_path},
              {"size_bytes", f.size_bytes},
              {"format", {{"format_id", to_string(f.format.format)}, {"confidence", to_string(f.format.confidence)}}},
              {"excerpt_bytes", f.header_excerpt.size()},
              {"header_fields", f.header_fields}};
    node["read_error"] = f.read_error ? json(*f.read_error) : json(nullptr);
    node["descriptor"] = f.descriptor ? json(to_string(*f.descriptor)) : json(nullptr);
    files.push_back(std::move(node));
  }
  json cues = json::array();
  for (const auto& s : p.schema_cues) {
    json cols = json::array();
    for (const auto& c : s.columns) {
      cols.push_back({{"name", c.name},
                      {"kind", to_string(c.kind)},
                      {"non_empty", c.non_empty},
                      {"distinct", c.distinct},
                      {"integer_valued", c.integer_valued}});
    }
    cues.push_back({{"relative_path", s.relative_path},
                    {"delimiter", std::string(1, s.delimiter)},
                    {"columns", cols},
                    {"probed_rows", s.probed_rows},
                    {"estimated_rows", s.estimated_rows},
                    {"fully_probed", s.fully_probed},
                    {"header_error", s.header_error ? json(*s.header_error) : json(nullptr)}});
  }
  json descriptors = json::array();
  for (const auto& d : p.metadata_descriptors) {
    descriptors.push_back({{"kind", to_string(d.kind)}, {"relative_path", d.relative_path}});
  }
  json targets = json::array();
  for (const auto& t : p.candidate_target_columns) targets.push_back({{"file", t.file}, {"column", t.column}});
  return json{{"root", p.root},
              {"files", files},
              {"total_bytes", p.total_bytes},
              {"modality", to_string(p.modality)},
              {"primary_structured_files", p.primary_structured_files},
              {"schema_cues", cues},
              {"metadata_descriptors", descriptors},
              {"candidate_target_columns", targets},
              {"domain_hint", p.domain_hint ? json(*p.domain_hint) : json(nullptr)},
              {"truncated", p.truncated}};
}

std::string profile_digest(const DataProfile& profile) {
  json j = profile_to_json(profile);
  j.erase("root");
  return json_digest(j);
}

bool has_tabular_evidence(const DataProfile& p) {
  for (const auto& s : p.schema_cues) {
    if (!s.header_error && !s.columns.empty()) return true;
  }
  return false;
}

bool has_identified_target(const DataProfile& p) { return !p.candidate_target_columns.empty(); }

const ColumnCue* target_column_cue(const DataProfile& p, const TargetCandidate& target) {
  const SchemaCue* s = p.find_schema(target.file);
  return s ? s->find(target.column) : nullptr;
}

bool target_is_categorical(const DataProfile& p) {
  if (p.candidate_target_columns.empty()) return false;
  const ColumnCue* c = target_column_cue(p, p.candidate_target_columns.front());
  return c && is_categorical_target(*c);
}

bool has_numeric_features(const DataProfile& p) {
  for (const auto& s : p.schema_cues) {
    if (s.header_error) continue;
    for (const auto& c : s.columns) {
      if (c.kind != ColumnKind::numeric) continue;
      TargetCandidate tc{s.relative_path, c.name};
      if (std::find(p.candidate_target_columns.begin(), p.candidate_target_columns.end(), tc) ==
          p.candidate_target_columns.end()) {
        return true;
      }
    }
  }
  return false;
}

bool has_metadata_descriptor(const DataProfile& p) { return !p.metadata_descriptors.empty(); }

std::vector<const FileNode*> image_files(const DataProfile& p) {
  std::vector<const FileNode*> out;
  for (const auto* f : p.data_files()) {
    if (family_of(f->format.format) == FormatFamily::image) out.push_back(f);
  }
  return out;
}

}  // namespace aiready
