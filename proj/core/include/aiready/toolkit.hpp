#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "aiready/canonical_json.hpp"
#include "aiready/inspector.hpp"
#include "aiready/plan.hpp"
#include "aiready/taxonomy.hpp"

namespace aiready {

struct InputRequirements {
  EvidenceClass evidence = EvidenceClass::metadata;
  std::vector<ColumnKind> column_kinds;  // each must occur somewhere in the profile

  friend bool operator==(const InputRequirements&, const InputRequirements&) = default;
};

struct ToolMetadata {
  std::string tool_id;
  std::vector<std::string> scope;  // element or sub-dimension ids
  InputRequirements input_requirements;
  std::vector<std::string> domain_applicability = {"any"};
  std::string method_summary;
  int version = 0;  // assigned by the library

  friend bool operator==(const ToolMetadata&, const ToolMetadata&) = default;
};

struct ExternalDescriptor {
  std::string executable;
  std::vector<std::string> args;
  int protocol_version = 1;

  friend bool operator==(const ExternalDescriptor&, const ExternalDescriptor&) = default;
};

struct ToolSpec {
  ToolMetadata metadata;
  ToolKind kind = ToolKind::builtin;
  std::string evaluator_id;                // builtin
  json default_bindings = json::object();  // builtin
  json program;                            // dsl
  ExternalDescriptor external;             // external

  friend bool operator==(const ToolSpec&, const ToolSpec&) = default;
};

json tool_to_json(const ToolSpec& spec);
ToolSpec tool_from_json(const json& j);  // throws InvalidToolSpec

/// Throws Error(InvalidToolSpec).
void validate_tool(const ToolSpec& spec);

bool requirements_met(const InputRequirements& req, const DataProfile& profile);

/// Tools keyed by id, each with its full version history. With a directory the
/// library persists `index.json` plus one `<id>.v<N>.json` per version; without
/// one it lives in memory.
class ToolLibrary {
 public:
  ToolLibrary() = default;
  explicit ToolLibrary(std::filesystem::path dir);

  /// Returns the tool id. Re-registering bumps the version; earlier versions
  /// stay readable through versions().
  std::string register_tool(ToolSpec spec);

  std::optional<ToolSpec> find(std::string_view tool_id) const;
  std::vector<ToolSpec> versions(std::string_view tool_id) const;
  std::vector<ToolSpec> latest() const;  // sorted by id
  bool contains(std::string_view tool_id) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  void persist(const ToolSpec& spec);

  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::map<std::string, std::vector<ToolSpec>, std::less<>> tools_;
};

enum class Outcome { success, runtime_failure, semantic_failure };

std::string_view to_string(Outcome o);
std::optional<Outcome> outcome_from_string(std::string_view s);

struct ToolMemoryEntry {
  std::string tool_id;
  int tool_version = 0;
  std::string element_id;
  std::string profile_digest;
  Modality modality = Modality::unknown;
  Outcome outcome = Outcome::success;
  int iterations_used = 0;
  std::optional<std::string> failure_signature;
  std::string timestamp;  // UTC, ISO-8601; filled on append when empty

  friend bool operator==(const ToolMemoryEntry&, const ToolMemoryEntry&) = default;
};

json entry_to_json(const ToolMemoryEntry& e);
ToolMemoryEntry entry_from_json(const json& j);

/// Append-only execution log. With a path it is a JSONL file synced after every
/// append; on open, a partial trailing record is dropped and cut from the file.
class ToolMemory {
 public:
  ToolMemory() = default;
  explicit ToolMemory(std::filesystem::path path);

  /// Throws UnknownTool when the tool is not in `library`, PersistenceFailure
  /// when the write does not reach disk.
  void record(const ToolLibrary& library, ToolMemoryEntry entry);

  std::vector<ToolMemoryEntry> entries() const;
  std::size_t size() const;
  /// Lines dropped while loading (partial or unparsable).
  std::size_t rejected() const { return rejected_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::vector<ToolMemoryEntry> entries_;
  std::size_t rejected_ = 0;
};

/// Tools whose scope covers the element (or its sub-dimension) and whose input
/// requirements the profile meets, best first.
/// `digest` is profile_digest(profile); computed when empty.
std::vector<ToolSpec> find_compatible(const ToolLibrary& library, const ToolMemory& memory, const AtomicElement& element,
                                      const DataProfile& profile, std::string digest = {});

/// Registers "builtin.<element>" for every element with a builtin evaluator
/// that is not yet in the library. Returns how many were added.
std::size_t seed_builtin_tools(ToolLibrary& library, const Registry& registry);

}  // namespace aiready
