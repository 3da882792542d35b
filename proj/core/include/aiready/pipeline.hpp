#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "aiready/executor.hpp"
#include "aiready/inspector.hpp"
#include "aiready/planner.hpp"
#include "aiready/report.hpp"
#include "aiready/selector.hpp"
#include "aiready/taxonomy.hpp"
#include "aiready/toolkit.hpp"

namespace aiready {

struct EngineConfig {
  ProfileOptions profile;
  PlannerConfig planner;  // carries the seed
  int max_debug_iterations = 3;
  double external_timeout_secs = 120.0;
  ProgramLimits limits;
  std::size_t parallelism = 1;
  ReportOptions report;
};

/// Settings that can change results, as canonical JSON. Parallelism and paths
/// are left out.
json config_to_json(const EngineConfig& config);

struct EngineContext {
  const Registry& registry;
  const KBIndex& kb;
  ToolLibrary& library;
  ToolMemory& memory;
  Generator* generator = nullptr;
  FileReader* reader = nullptr;  // default_reader() when null
};

struct ElementRun {
  std::string element_id;
  ElementScore score;
  std::size_t tool_runs = 0;
  std::size_t run_budget = 0;  // max(1, refinements) x (candidates + 1) x debug iterations
  int refinements = 0;
  SynthesisStats synthesis;
};

struct DatasetEvaluation {
  std::shared_ptr<const DataProfile> profile;
  EvaluationManifest manifest;
  std::vector<ElementRun> runs;  // active elements, registry order
  AIReadyReport report;

  std::size_t failed_elements() const;
};

/// Runs one active element through plan, execute, review and refinement.
ElementRun run_element(const AtomicElement& element, std::shared_ptr<const DataProfile> profile,
                       const std::string& digest, const EngineConfig& config, EngineContext& ctx);

/// Profiles `root`, selects elements, evaluates the active ones (up to
/// config.parallelism at a time) and builds the report. Throws on an
/// unreadable root.
DatasetEvaluation evaluate_dataset(const std::filesystem::path& root, const EngineConfig& config, EngineContext& ctx);

/// Dataset label used in reports: the root's final path component.
std::string dataset_name(const std::filesystem::path& root);

}  // namespace aiready
