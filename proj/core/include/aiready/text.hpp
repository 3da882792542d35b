#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aiready::text {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

/// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> split_lines(std::string_view s);

/// Strict decimal/scientific number parse of a trimmed cell. Rejects
/// "nan"/"inf" spellings and hex.
std::optional<double> parse_number(std::string_view s);

bool is_integer_text(std::string_view s);

/// True when the cell matches one of the fixed date/datetime shapes
/// (YYYY-MM-DD, YYYY/MM/DD, DD/MM/YYYY, optionally followed by a time).
bool looks_like_date(std::string_view s);

/// Lowercased maximal runs of ASCII alphanumerics.
std::vector<std::string> word_tokens(std::string_view s);

/// Lowercase, every non-alphanumeric run collapsed to one space, trimmed.
/// "Body-Mass  Index" -> "body mass index".
std::string normalize_phrase(std::string_view s);

/// True when `haystack` (already normalized) contains `needle` (normalized)
/// on word boundaries.
bool contains_phrase(std::string_view normalized_haystack, std::string_view normalized_needle);

/// UTF-8 validation. A multi-byte sequence cut off by the end of the buffer is
/// accepted when `allow_truncated_tail` is set.
bool valid_utf8(std::string_view bytes, bool allow_truncated_tail = true);

/// Replaces numbers with <n> and absolute/relative paths with <path>, collapses
/// whitespace. Used to compare failures across runs.
std::string normalize_failure(std::string_view message);

/// Printable formatting helper (one decimal, fixed).
std::string fixed(double v, int decimals);

}  // namespace aiready::text
