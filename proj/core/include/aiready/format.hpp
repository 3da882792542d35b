#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace aiready {

enum class FormatId {
  csv, tsv, json, jsonl, parquet, hdf5, fits, netcdf,
  png, jpeg, tiff, gif, txt, md, yaml, zip, gzip, pdf, unknown
};

enum class Confidence { magic, extension, content_sniff };

struct FormatGuess {
  FormatId format = FormatId::unknown;
  Confidence confidence = Confidence::extension;

  friend bool operator==(const FormatGuess&, const FormatGuess&) = default;
};

enum class FormatFamily { tabular, image, sequence_text, other };

std::string_view to_string(FormatId id);
std::string_view to_string(Confidence c);
std::optional<FormatId> format_from_string(std::string_view s);
std::optional<Confidence> confidence_from_string(std::string_view s);

FormatFamily family_of(FormatId id);

/// Formats whose rows/columns can be probed as text (csv, tsv, json, jsonl).
bool is_probeable_tabular(FormatId id);

/// Formats stored as text, for encoding checks.
bool is_text_format(FormatId id);

/// Formats readable by common ML data loaders without custom parsing.
bool is_ml_loadable(FormatId id);

/// Format implied by a file extension alone (".csv" -> csv). Case-insensitive.
std::optional<FormatId> format_from_extension(std::string_view extension);

/// Total: magic bytes win, then the extension, then a content sniff of the
/// head bytes; unknown when nothing fires.
FormatGuess detect_format(std::string_view head_bytes, std::string_view extension);

}  // namespace aiready
