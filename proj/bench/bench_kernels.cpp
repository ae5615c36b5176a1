// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "ccg/equilibrium.hpp"
#include "ccg/metrics.hpp"
#include "ccg/verify.hpp"

namespace {

using namespace ccg;

ModelInstance well_separated_instance(int N) {
  return ModelInstance::linear(1.0, 0.0, make_well_separated_types(N, 0.01));
}

void BM_Metrics(benchmark::State& state, Exec exec) {
  const auto inst = well_separated_instance(16);
  const auto eq = engagement_eq(inst, 2);
  for (auto _ : state) {
    auto r = estimate_outcome_metrics(inst, Metric::engagement, eq, 2, state.range(0), 7, exec);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BestResponse(benchmark::State& state, Exec exec) {
  const auto inst = well_separated_instance(4);
  const auto eq = engagement_eq(inst, 2);
  for (auto _ : state) {
    auto r = best_response_gap(inst, Metric::engagement, eq, 2, 50, state.range(0), 7, exec);
    benchmark::DoNotOptimize(r);
  }
}

BENCHMARK_CAPTURE(BM_Metrics, serial, Exec::serial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Metrics, parallel, Exec::parallel)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BestResponse, serial, Exec::serial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BestResponse, parallel, Exec::parallel)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
