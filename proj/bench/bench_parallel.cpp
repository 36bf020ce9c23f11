// Serial reference loops against the OpenMP kernels on the same workloads.

#include <benchmark/benchmark.h>

#include "monofact/harness.hpp"

using namespace monofact;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void set_label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_RunExperiment(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.world = PermutedPowerLaw{10'000'000, 1000, 0.0};
  cfg.n = 2000;
  cfg.algorithm = LmAlgorithm::monofact_memorizer();
  cfg.trials = 64;
  cfg.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.trials));
  set_label(state);
}
BENCHMARK(BM_RunExperiment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LemmaSweep(benchmark::State& state) {
  SeededRng rng(2);
  const ExplicitWorld prior = random_explicit_world(6, 10, rng);
  for (auto _ : state) benchmark::DoNotOptimize(verify_lemma_meat_exhaustive(prior, 1e-9, mode(state)));
  set_label(state);
}
BENCHMARK(BM_LemmaSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GtConcentration(benchmark::State& state) {
  const FactoidDist p = power_law_dist(10'000, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(run_gt_concentration(p, 1000, 0.1, 500, 3, mode(state)));
  state.SetItemsProcessed(state.iterations() * 500);
  set_label(state);
}
BENCHMARK(BM_GtConcentration)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
