#include "aiready/harness.hpp"

#include <chrono>

namespace aiready {

json record_to_json(const RunRecord& r) {
  json j = {{"dataset_id", r.dataset_id},
            {"completed", r.completed},
            {"element_failures", r.element_failures},
            {"synthesis_attempts", r.synthesis_attempts},
            {"synthesis_successes", r.synthesis_successes},
            {"debug_iterations", r.debug_iterations},
            {"wall_time_secs", r.wall_time_secs}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

RunRecord record_from_json(const json& j) {
  try {
    RunRecord r;
    r.dataset_id = j.at("dataset_id").get<std::string>();
    r.completed = j.at("completed").get<bool>();
    r.element_failures = j.value("element_failures", std::size_t{0});
    r.synthesis_attempts = j.value("synthesis_attempts", std::size_t{0});
    r.synthesis_successes = j.value("synthesis_successes", std::size_t{0});
    r.debug_iterations = j.value("debug_iterations", std::vector<int>{});
    r.wall_time_secs = j.value("wall_time_secs", 0.0);
    r.error = j.value("error", std::string());
    if (r.synthesis_successes > r.synthesis_attempts) fail(ErrorCode::InvalidConfig, "more successes than attempts");
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("bad run record: ") + e.what());
  }
}

RunRecord make_record(std::string dataset_id, const DatasetEvaluation& ev, double wall_time_secs) {
  RunRecord r;
  r.dataset_id = std::move(dataset_id);
  r.element_failures = ev.failed_elements();
  r.completed = r.element_failures == 0;
  for (const auto& run : ev.runs) {
    r.synthesis_attempts += static_cast<std::size_t>(run.synthesis.attempts);
    r.synthesis_successes += static_cast<std::size_t>(run.synthesis.successes);
    r.debug_iterations.insert(r.debug_iterations.end(), run.synthesis.iterations.begin(), run.synthesis.iterations.end());
  }
  r.wall_time_secs = wall_time_secs;
  return r;
}

std::optional<double> compute_sc(const std::vector<RunRecord>& records) {
  if (records.empty()) return std::nullopt;
  std::size_t done = 0;
  for (const auto& r : records) done += r.completed ? 1 : 0;
  return static_cast<double>(done) / static_cast<double>(records.size());
}

std::optional<double> compute_tcsr(const std::vector<RunRecord>& records) {
  std::size_t attempts = 0, successes = 0;
  for (const auto& r : records) {
    attempts += r.synthesis_attempts;
    successes += r.synthesis_successes;
  }
  if (attempts == 0) return std::nullopt;
  return static_cast<double>(successes) / static_cast<double>(attempts);
}

std::optional<double> compute_tce(const std::vector<RunRecord>& records) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : records) {
    for (int it : r.debug_iterations) {
      sum += it;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

SystemMetrics compute_metrics(const std::vector<RunRecord>& records) {
  return {compute_sc(records), compute_tcsr(records), compute_tce(records)};
}

json metrics_to_json(const SystemMetrics& m) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"sc", opt(m.sc)}, {"tcsr", opt(m.tcsr)}, {"tce", opt(m.tce)}};
}

std::vector<BatchItem> run_batch(const std::vector<std::string>& roots, const EngineConfig& config, EngineContext& ctx) {
  std::vector<BatchItem> out;
  for (const auto& root : roots) {
    auto start = std::chrono::steady_clock::now();
    BatchItem item;
    try {
      DatasetEvaluation ev = evaluate_dataset(root, config, ctx);
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      item.record = make_record(root, ev, secs);
      item.report = std::move(ev.report);
    } catch (const std::exception& e) {
      item.record.dataset_id = root;
      item.record.completed = false;
      item.record.error = e.what();
      item.record.wall_time_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace aiready
