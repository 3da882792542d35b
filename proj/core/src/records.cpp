#include "aiready/records.hpp"

#include <cctype>
#include <limits>
#include <map>
#include <set>

#include "aiready/canonical_json.hpp"
#include "aiready/error.hpp"
#include "aiready/text.hpp"

namespace aiready {
namespace {

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return {};
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return canonical_dump(v);
  return v.dump();
}

struct ObjectRows {
  RecordTable& t;
  std::map<std::string, std::size_t> index;

  void add(const json& obj) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (index.count(it.key())) continue;
      index[it.key()] = t.columns.size();
      t.columns.push_back(it.key());
      for (auto& r : t.rows) r.emplace_back();
    }
    Record row(t.columns.size());
    for (auto it = obj.begin(); it != obj.end(); ++it) row[index[it.key()]] = scalar_text(it.value());
    t.rows.push_back(std::move(row));
  }
};

// Complete top-level objects from the front of a possibly cut-off JSON array.
std::vector<json> array_objects_prefix(std::string_view s, std::size_t max_rows, bool& more) {
  std::vector<json> out;
  more = false;
  std::size_t i = s.find('[');
  if (i == std::string_view::npos) return out;
  ++i;
  while (i < s.size()) {
    while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
    if (i >= s.size() || s[i] != '{') break;
    if (out.size() >= max_rows) {
      more = true;
      break;
    }
    int depth = 0;
    bool in_str = false, esc = false;
    std::size_t start = i;
    for (; i < s.size(); ++i) {
      char c = s[i];
      if (in_str) {
        if (esc) esc = false;
        else if (c == '\\') esc = true;
        else if (c == '"') in_str = false;
        continue;
      }
      if (c == '"') in_str = true;
      else if (c == '{') ++depth;
      else if (c == '}' && --depth == 0) {
        ++i;
        break;
      }
    }
    if (depth != 0) break;
    auto obj = json::parse(s.substr(start, i - start), nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) break;
    out.push_back(std::move(obj));
  }
  return out;
}

}  // namespace

RecordTable parse_records(std::string_view body, FormatId format, bool input_complete, std::size_t max_rows) {
  RecordTable t;
  std::size_t bom = 0;
  if (body.size() >= 3 && body.substr(0, 3) == "\xEF\xBB\xBF") bom = 3;
  body.remove_prefix(bom);
  if (body.find('\0') != std::string_view::npos) fail(ErrorCode::UnparsableHeader, "binary content");

  if (format == FormatId::csv || format == FormatId::tsv) {
    t.delimiter = sniff_delimiter(body, format == FormatId::tsv ? '\t' : ',');
    auto parsed = parse_delimited(body, t.delimiter, input_complete, max_rows == std::numeric_limits<std::size_t>::max() ? max_rows : max_rows + 1);
    if (parsed.records.empty()) fail(ErrorCode::UnparsableHeader, "no header row");
    std::set<std::string> seen;
    const Record& header = parsed.records.front();
    for (std::size_t i = 0; i < header.size(); ++i) {
      std::string name(text::trim(header[i]));
      if (name.empty()) name = "column_" + std::to_string(i + 1);
      std::string unique = name;
      for (int k = 2; seen.count(unique); ++k) unique = name + "_" + std::to_string(k);
      seen.insert(unique);
      t.columns.push_back(unique);
    }
    for (std::size_t r = 1; r < parsed.records.size(); ++r) {
      Record rec = std::move(parsed.records[r]);
      if (rec.size() != t.columns.size()) ++t.ragged_rows;
      rec.resize(t.columns.size());
      t.rows.push_back(std::move(rec));
    }
    auto nl = body.find('\n');
    t.header_bytes = bom + (nl == std::string_view::npos ? body.size() : nl + 1);
    t.consumed = bom + parsed.consumed;
    t.hit_row_limit = parsed.hit_record_limit;
  } else if (format == FormatId::jsonl) {
    ObjectRows rows{t, {}};
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t nl = body.find('\n', pos);
      if (nl == std::string_view::npos && !input_complete) break;
      std::size_t end = nl == std::string_view::npos ? body.size() : nl;
      auto line = text::trim(body.substr(pos, end - pos));
      if (!line.empty()) {
        if (t.rows.size() >= max_rows) {
          t.hit_row_limit = true;
          break;
        }
        auto obj = json::parse(line, nullptr, false);
        if (!obj.is_discarded() && obj.is_object()) rows.add(obj);
      }
      pos = nl == std::string_view::npos ? body.size() : nl + 1;
      t.consumed = bom + pos;
    }
    if (t.columns.empty()) fail(ErrorCode::UnparsableHeader, "no JSON objects");
  } else if (format == FormatId::json) {
    ObjectRows rows{t, {}};
    auto doc = json::parse(body, nullptr, false);
    if (!doc.is_discarded()) {
      const json* arr = nullptr;
      if (doc.is_array()) {
        arr = &doc;
      } else if (doc.is_object()) {
        for (auto it = doc.begin(); it != doc.end(); ++it) {
          if (it.value().is_array() && !it.value().empty() && it.value().front().is_object()) {
            arr = &it.value();
            break;
          }
        }
      }
      if (arr) {
        for (const auto& item : *arr) {
          if (!item.is_object()) continue;
          if (t.rows.size() >= max_rows) {
            t.hit_row_limit = true;
            break;
          }
          rows.add(item);
        }
      }
    } else if (!input_complete) {
      bool more = false;
      for (const auto& o : array_objects_prefix(body, max_rows, more)) rows.add(o);
      t.hit_row_limit = more;
    }
    t.consumed = bom + body.size();
    if (t.rows.empty()) fail(ErrorCode::UnparsableHeader, "not an array of records");
  } else {
    fail(ErrorCode::UnparsableHeader, std::string("format ") + std::string(to_string(format)) + " is not tabular text");
  }
  if (t.columns.empty()) fail(ErrorCode::UnparsableHeader, "no columns");
  return t;
}

}  // namespace aiready
