#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aiready/canonical_json.hpp"
#include "aiready/executor.hpp"
#include "aiready/taxonomy.hpp"

namespace aiready {

enum class ElementStatus { scored, pruned, failed };

std::string_view to_string(ElementStatus s);

struct Provenance {
  std::string tool_id;
  int iterations_used = 0;
  json evidence_summary = json::object();
  bool truncated = false;
  bool synthesized = false;
};

struct ElementScore {
  std::string element_id;
  ElementStatus status = ElementStatus::pruned;
  std::optional<double> score;  // present iff scored
  json interpretables = json::object();
  std::optional<Provenance> provenance;
  std::string reason;             // pruning clause or failure summary
  json verdicts = json::array();  // final verdicts of a failed element
  std::vector<std::string> kb_citations;
  double effective_weight = 0.0;  // within its sub-dimension
};

/// Applies the map with clamping and attaches provenance.
ElementScore normalize(const ExecutionResult& result, const ScoringStrategy& scoring);
ElementScore pruned_score(std::string element_id, std::string reason);
ElementScore failed_score(std::string element_id, std::string reason, json verdicts);

struct AggregateNode {
  std::string id;
  std::string name;
  double weight = 0.0;            // as declared
  double effective_weight = 0.0;  // renormalized among scored siblings
  std::optional<double> score;
  ElementStatus status = ElementStatus::pruned;  // failed when only failures lie below
};

struct ScoreTree {
  std::vector<ElementScore> elements;  // registry order
  std::vector<AggregateNode> sub_dimensions;
  std::vector<AggregateNode> dimensions;
  std::optional<double> total;

  const ElementScore* element(std::string_view id) const;
  const AggregateNode* sub_dimension(std::string_view id) const;
  const AggregateNode* dimension(std::string_view id) const;
};

/// Weighted mean over children that have a score, weights renormalized among
/// them. Zero total weight falls back to the plain mean. nullopt when no child
/// has a score.
std::optional<double> renormalized_mean(const std::vector<std::pair<double, std::optional<double>>>& children);

/// One score per registry element is expected; missing ones count as pruned.
ScoreTree aggregate(const std::vector<ElementScore>& scores, const Registry& registry);

struct RunMetadata {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::string registry_version;
};

struct ReportOptions {
  double deficiency_threshold = 0.6;
};

struct AIReadyReport {
  std::string dataset;  // root directory name
  std::string profile_digest;
  json profile_summary = json::object();
  json manifest = json::object();
  ScoreTree tree;
  json diagnostics = json::array();
  json remediation = json::array();
  std::optional<json> downstream;
  RunMetadata metadata;
};

AIReadyReport build_report(std::string dataset, const DataProfile& profile, const json& manifest, ScoreTree tree,
                           const Registry& registry, const RunMetadata& metadata, const ReportOptions& options = {});

/// 0-100 with one decimal.
std::string display_score(double score);

json report_to_json(const AIReadyReport& report);
std::string render_json(const AIReadyReport& report);  // canonical, newline-terminated
std::string render_markdown(const AIReadyReport& report, const Registry& registry);

/// Dataset-by-sub-dimension matrix: scores, "-" for pruned, "✗" for failed.
std::string render_matrix(const std::vector<std::pair<std::string, const ScoreTree*>>& rows, const Registry& registry);

}  // namespace aiready
