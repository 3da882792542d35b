#include "aiready/delimited.hpp"

#include <array>
#include <map>

namespace aiready {

ParsedRecords parse_delimited(std::string_view text, char delimiter, bool input_complete,
                              std::size_t max_records) {
  ParsedRecords out;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  const std::size_t n = text.size();

  auto finish_record = [&](std::size_t end_pos) {
    current.push_back(std::move(field));
    field.clear();
    field_started = false;
    bool blank = current.size() == 1 && current[0].empty();
    if (!blank) out.records.push_back(std::move(current));
    current.clear();
    out.consumed = end_pos;
  };

  while (i < n) {
    if (out.records.size() >= max_records) {
      out.hit_record_limit = true;
      return out;
    }
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        in_quotes = false;
      } else {
        field += c;
      }
      ++i;
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
      ++i;
      continue;
    }
    if (c == delimiter) {
      current.push_back(std::move(field));
      field.clear();
      field_started = false;
      ++i;
      continue;
    }
    if (c == '\r' && i + 1 < n && text[i + 1] == '\n') {
      finish_record(i + 2);
      i += 2;
      continue;
    }
    if (c == '\n') {
      finish_record(i + 1);
      ++i;
      continue;
    }
    field += c;
    field_started = true;
    ++i;
  }
  if (input_complete && (field_started || !field.empty() || !current.empty())) {
    if (out.records.size() >= max_records) {
      out.hit_record_limit = true;
      return out;
    }
    finish_record(n);
  }
  return out;
}

char sniff_delimiter(std::string_view sample, char fallback) {
  static constexpr std::array<char, 4> kCandidates{',', '\t', ';', '|'};
  char best = fallback;
  std::size_t best_score = 0;
  for (char d : kCandidates) {
    ParsedRecords parsed = parse_delimited(sample, d, false, 20);
    if (parsed.records.empty()) parsed = parse_delimited(sample, d, true, 20);
    std::map<std::size_t, std::size_t> counts;
    for (const auto& r : parsed.records) ++counts[r.size()];
    std::size_t mode_width = 0, mode_count = 0;
    for (auto [width, count] : counts) {
      if (count > mode_count || (count == mode_count && width > mode_width)) {
        mode_width = width;
        mode_count = count;
      }
    }
    if (mode_width < 2) continue;
    // Consistency first, then width.
    std::size_t score = mode_count * 1000 + mode_width;
    if (score > best_score) {
      best_score = score;
      best = d;
    }
  }
  return best;
}

}  // namespace aiready
