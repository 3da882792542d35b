#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace aiready {

using Record = std::vector<std::string>;

struct ParsedRecords {
  std::vector<Record> records;
  std::size_t consumed = 0;  ///< bytes of input covered by `records`
  bool hit_record_limit = false;
};

/// RFC 4180 style parsing (quoted fields, doubled quotes, CRLF). When
/// `input_complete` is false the final record is dropped unless it is
/// newline-terminated, since it may be cut off. Blank lines are skipped.
ParsedRecords parse_delimited(std::string_view text, char delimiter, bool input_complete,
                              std::size_t max_records);

/// Picks the delimiter among , \t ; | that splits the first lines into the
/// most consistent number (> 1) of fields. Falls back to `fallback`.
char sniff_delimiter(std::string_view sample, char fallback);

}  // namespace aiready
