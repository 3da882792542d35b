#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aiready/canonical_json.hpp"
#include "aiready/format.hpp"
#include "aiready/io.hpp"

namespace aiready {

enum class ColumnKind { numeric, categorical, text, datetime };
enum class Modality { tabular, image, sequence_text, multimodal, unknown };
enum class DescriptorKind { readme, license, citation, checksum, descriptor };

std::string_view to_string(ColumnKind k);
std::string_view to_string(Modality m);
std::string_view to_string(DescriptorKind k);
std::optional<ColumnKind> column_kind_from_string(std::string_view s);
std::optional<Modality> modality_from_string(std::string_view s);

struct ScanLimits {
  std::size_t max_files = 100000;
  std::size_t max_depth = 64;
  std::size_t probe_bytes = 64 * 1024;
  std::size_t probe_rows = 200;
  std::size_t workers = 4;
};

struct FileNode {
  std::string relative_path;  ///< generic form, '/' separated
  std::uint64_t size_bytes = 0;
  FormatGuess format;
  /// Bytes read from the start of the file; never longer than the probe
  /// budget. Kept in memory only.
  std::string header_excerpt;
  std::map<std::string, std::string> header_fields;
  std::optional<std::string> read_error;
  std::optional<DescriptorKind> descriptor;

  std::string extension() const;
};

struct ColumnCue {
  std::string name;
  ColumnKind kind = ColumnKind::text;
  std::size_t non_empty = 0;
  std::size_t distinct = 0;
  bool integer_valued = false;
};

struct SchemaCue {
  std::string relative_path;
  char delimiter = ',';  ///< meaningful for csv/tsv only
  std::vector<ColumnCue> columns;
  std::size_t probed_rows = 0;
  std::uint64_t estimated_rows = 0;
  bool fully_probed = false;
  std::optional<std::string> header_error;

  const ColumnCue* find(std::string_view column) const;
};

struct MetadataDescriptor {
  DescriptorKind kind = DescriptorKind::readme;
  std::string relative_path;
};

struct TargetCandidate {
  std::string file;
  std::string column;

  friend bool operator==(const TargetCandidate&, const TargetCandidate&) = default;
};

struct DataProfile {
  std::string root;
  std::vector<FileNode> files;
  std::uint64_t total_bytes = 0;
  Modality modality = Modality::unknown;
  std::vector<std::string> primary_structured_files;
  std::vector<SchemaCue> schema_cues;
  std::vector<MetadataDescriptor> metadata_descriptors;
  std::vector<TargetCandidate> candidate_target_columns;
  std::optional<std::string> domain_hint;
  bool truncated = false;

  const FileNode* find_file(std::string_view relative_path) const;
  const SchemaCue* find_schema(std::string_view relative_path) const;
  /// Files that are not sidecar metadata.
  std::vector<const FileNode*> data_files() const;
};

struct TreeScan {
  std::vector<FileNode> files;
  bool truncated = false;
};

/// Lists regular files under `root` in lexicographic order of relative path,
/// reads a bounded head of each and detects its format. Symlinks are skipped.
/// Per-file read failures are recorded on the node.
TreeScan scan_tree(const std::filesystem::path& root, const ScanLimits& limits,
                   FileReader& reader = default_reader());

/// Infers columns and kinds from the node's header excerpt. Throws
/// Error(UnparsableHeader) for non-tabular content.
SchemaCue probe_schema(const FileNode& file, const ScanLimits& limits = {});

struct ProfileOptions {
  ScanLimits limits;
  std::optional<std::string> domain_override;
};

DataProfile build_profile(const std::filesystem::path& root, const ProfileOptions& options = {},
                          FileReader& reader = default_reader());

/// Sidecar metadata classification by file name.
std::optional<DescriptorKind> descriptor_kind(std::string_view relative_path);

json profile_to_json(const DataProfile& profile);

/// Digest over the profile content (the root path itself is excluded so that
/// identical trees at different locations share a digest).
std::string profile_digest(const DataProfile& profile);

// Profile facts used by applicability predicates and planners.
bool has_tabular_evidence(const DataProfile& p);
bool has_identified_target(const DataProfile& p);
bool target_is_categorical(const DataProfile& p);
bool has_numeric_features(const DataProfile& p);
bool has_metadata_descriptor(const DataProfile& p);
std::vector<const FileNode*> image_files(const DataProfile& p);
const ColumnCue* target_column_cue(const DataProfile& p, const TargetCandidate& target);

}  // namespace aiready
