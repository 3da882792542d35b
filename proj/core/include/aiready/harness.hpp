#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aiready/pipeline.hpp"

namespace aiready {

struct RunRecord {
  std::string dataset_id;
  bool completed = false;  // report produced and no element failed
  std::size_t element_failures = 0;
  std::size_t synthesis_attempts = 0;
  std::size_t synthesis_successes = 0;
  std::vector<int> debug_iterations;  // one per successful synthesis
  double wall_time_secs = 0.0;
  std::string error;  // fatal error text when no report was produced
};

json record_to_json(const RunRecord& r);
RunRecord record_from_json(const json& j);

RunRecord make_record(std::string dataset_id, const DatasetEvaluation& ev, double wall_time_secs);

struct SystemMetrics {
  std::optional<double> sc;
  std::optional<double> tcsr;
  std::optional<double> tce;
};

std::optional<double> compute_sc(const std::vector<RunRecord>& records);
std::optional<double> compute_tcsr(const std::vector<RunRecord>& records);
std::optional<double> compute_tce(const std::vector<RunRecord>& records);
SystemMetrics compute_metrics(const std::vector<RunRecord>& records);
json metrics_to_json(const SystemMetrics& m);

struct BatchItem {
  RunRecord record;
  std::optional<AIReadyReport> report;
};

/// Evaluates each root; failures are captured in the record and never stop the
/// batch. Results keep corpus order.
std::vector<BatchItem> run_batch(const std::vector<std::string>& roots, const EngineConfig& config, EngineContext& ctx);

}  // namespace aiready
