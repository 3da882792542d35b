#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace aiready {

using json = nlohmann::json;

/// Serializes `value` with sorted object keys, no insignificant whitespace and
/// shortest round-trip formatting for floating point numbers. Non-finite
/// numbers are written as null. Identical values always yield identical bytes.
std::string canonical_dump(const json& value);

/// Indented variant of canonical_dump, used for human-facing files.
std::string canonical_dump_pretty(const json& value);

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// sha256_hex(canonical_dump(value)).
std::string json_digest(const json& value);

}  // namespace aiready
