#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "aiready/delimited.hpp"
#include "aiready/inspector.hpp"
#include "aiready/io.hpp"
#include "aiready/plan.hpp"

namespace aiready {

// Column sample from one file. Absent and null cells are stored as "".
struct Table {
  std::string file;
  std::vector<std::string> columns;
  std::vector<ColumnKind> kinds;
  std::vector<Record> rows;

  std::optional<std::size_t> column_index(std::string_view name) const;
  std::vector<std::string> column(std::size_t index) const;
};

struct FileStat {
  std::string relative_path;
  FormatId format = FormatId::unknown;
  std::uint64_t size_bytes = 0;
  bool readable = true;
  bool parse_ok = true;
  std::string detail;
  std::map<std::string, std::string> header_fields;
};

struct MetadataText {
  std::string relative_path;
  DescriptorKind kind = DescriptorKind::readme;
  std::string text;
};

struct Evidence {
  std::string element_id;
  std::vector<Table> tables;
  std::vector<FileStat> file_stats;
  std::vector<MetadataText> metadata_texts;
  bool truncated = false;
  std::uint64_t rows_loaded = 0;
  std::uint64_t bytes_loaded = 0;
  // Read-only view of the profile the plan was made from. Evaluators use it
  // for structural facts (file census, schema cues, target candidates).
  std::shared_ptr<const DataProfile> profile;

  /// All metadata texts joined by newlines, lowercased.
  std::string metadata_corpus() const;
  json summary() const;
};

/// Honors the plan's evidence class, sampling mode and budgets. Reservoir
/// sampling draws from an RNG seeded by (plan seed, element id).
Evidence load_evidence(const ElementPlan& plan, std::shared_ptr<const DataProfile> profile,
                       FileReader& reader = default_reader());

/// True for "", "NA", "N/A", "null", "NaN" (case-insensitive, trimmed).
bool is_missing_cell(std::string_view cell);

}  // namespace aiready
