#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "aiready/delimited.hpp"
#include "aiready/format.hpp"

namespace aiready {

// Rows decoded from one tabular text file (csv, tsv, jsonl or a JSON array of
// objects). Cells are raw strings; null and absent values become "".
struct RecordTable {
  std::vector<std::string> columns;
  std::vector<Record> rows;
  char delimiter = ',';
  std::size_t header_bytes = 0;  // bytes before the first data row
  std::size_t consumed = 0;      // bytes covered by header + rows
  bool hit_row_limit = false;
  // Rows that had a different field count than the header (csv/tsv only).
  std::size_t ragged_rows = 0;
};

/// `input_complete` says whether `body` holds the whole file. Throws
/// Error(UnparsableHeader) when no header/object structure is found.
RecordTable parse_records(std::string_view body, FormatId format, bool input_complete, std::size_t max_rows);

}  // namespace aiready
