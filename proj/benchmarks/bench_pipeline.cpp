#include <benchmark/benchmark.h>

#include "aiready/pipeline.hpp"
#include "aiready/toolkit.hpp"

using namespace aiready;

namespace {

const std::filesystem::path kDatasets = std::filesystem::path(AIREADY_FIXTURE_DIR) / "datasets";

void BM_BuildProfile(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_profile(kDatasets / "tabular_labeled"));
}

void BM_EvaluateDataset(benchmark::State& state) {
  const auto& reg = default_registry();
  KBIndex kb = make_kb_index({});
  for (auto _ : state) {
    ToolLibrary lib;
    ToolMemory mem;
    seed_builtin_tools(lib, reg);
    EngineContext ctx{reg, kb, lib, mem, nullptr, nullptr};
    EngineConfig cfg;
    cfg.parallelism = static_cast<int>(state.range(0));
    benchmark::DoNotOptimize(evaluate_dataset(kDatasets / "tabular_labeled", cfg, ctx));
  }
}

}  // namespace

BENCHMARK(BM_BuildProfile)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateDataset)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
