#include <benchmark/benchmark.h>

#include <random>

#include "aiready/check_program.hpp"
#include "aiready/evaluators.hpp"
#include "aiready/report.hpp"

using namespace aiready;

namespace {

Evidence random_evidence(std::size_t rows, std::size_t cols) {
  std::mt19937_64 rng(42);
  Table t;
  t.file = "bench.csv";
  for (std::size_t c = 0; c < cols; ++c) {
    t.columns.push_back("c" + std::to_string(c));
    t.kinds.push_back(c == 0 ? ColumnKind::categorical : ColumnKind::numeric);
  }
  for (std::size_t r = 0; r < rows; ++r) {
    Record rec;
    rec.push_back("k" + std::to_string(rng() % 5));
    for (std::size_t c = 1; c < cols; ++c) rec.push_back(rng() % 20 == 0 ? "" : std::to_string(rng() % 1000));
    t.rows.push_back(std::move(rec));
  }
  Evidence ev;
  ev.tables.push_back(std::move(t));
  return ev;
}

void run(benchmark::State& state, const std::string& id, const json& bindings) {
  Evidence ev = random_evidence(static_cast<std::size_t>(state.range(0)), 10);
  for (auto _ : state) benchmark::DoNotOptimize(run_evaluator(id, ev, bindings));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MissingValueRate(benchmark::State& s) { run(s, "missing_value_rate", json::object()); }
void BM_ExactDuplicateRate(benchmark::State& s) { run(s, "exact_duplicate_rate", json::object()); }
void BM_NearDuplicateRate(benchmark::State& s) { run(s, "near_duplicate_rate", json::object()); }
void BM_LabelBalance(benchmark::State& s) { run(s, "label_balance", {{"target_column", "c0"}}); }
void BM_FeatureTargetAssociation(benchmark::State& s) {
  run(s, "feature_target_association", {{"target_column", "c0"}});
}

void BM_CheckProgram(benchmark::State& state) {
  Evidence ev = random_evidence(static_cast<std::size_t>(state.range(0)), 10);
  json program = json::parse(R"({"steps": [
    {"id": "a", "op": "select", "column": "c3"},
    {"id": "c", "op": "reduce", "input": "a", "fn": "fraction_matching", "predicate": "is_missing"},
    {"op": "emit", "score": "c", "interpretables": {"missing_fraction": "c"}}
  ]})");
  for (auto _ : state) benchmark::DoNotOptimize(run_program(program, ev));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_MissingValueRate)->Range(1 << 8, 1 << 16);
BENCHMARK(BM_ExactDuplicateRate)->Range(1 << 8, 1 << 16);
BENCHMARK(BM_NearDuplicateRate)->Range(1 << 6, 1 << 12);
BENCHMARK(BM_LabelBalance)->Range(1 << 8, 1 << 16);
BENCHMARK(BM_FeatureTargetAssociation)->Range(1 << 8, 1 << 14);
BENCHMARK(BM_CheckProgram)->Range(1 << 8, 1 << 16);
