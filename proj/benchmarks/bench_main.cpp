#include <benchmark/benchmark.h>

#include "altbd/presets.hpp"
#include "altbd/regularity.hpp"
#include "altbd/simulate.hpp"
#include "altbd/stationary.hpp"

namespace {

using namespace altbd;

RateSet mixed_rates() {
  return RateSet({parse_rate_expr("1 + 1/(n+1)"), RateSpec::affine(2.0, 0.1), RateSpec::constant(1.5),
                  RateSpec::constant(0.7), RateSpec::constant(0.3), parse_rate_expr("0.5 + 0.01*n")},
                 Topology::one_sided());
}

void BM_OneSidedWeights(benchmark::State& state) {
  const auto r = mixed_rates();
  for (auto _ : state) benchmark::DoNotOptimize(one_sided_weights(r, state.range(0)));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OneSidedWeights)->RangeMultiplier(8)->Range(64, 32768)->Complexity();

void BM_DenseSolve(benchmark::State& state) {
  const auto r = mixed_rates();
  for (auto _ : state) benchmark::DoNotOptimize(dense_balance_solve(r, 0, state.range(0)));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DenseSolve)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void BM_Ergodicity(benchmark::State& state) {
  const auto r = stabilized_telegraph(1.0, {});
  for (auto _ : state) benchmark::DoNotOptimize(ergodicity(r, 16, state.range(0)));
}
BENCHMARK(BM_Ergodicity)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_ReuterRecursion(benchmark::State& state) {
  const auto r = mixed_rates();
  for (auto _ : state) benchmark::DoNotOptimize(reuter_recursion_one_sided(r, state.range(0)));
}
BENCHMARK(BM_ReuterRecursion)->Arg(100)->Arg(500);

void BM_SimulatePath(benchmark::State& state) {
  const auto r = dam_rate_set({});
  SimConfig cfg;
  cfg.max_events = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_path(r, cfg));
    ++cfg.seed;
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatePath)->Arg(100000)->Arg(1000000);

}  // namespace
BENCHMARK_MAIN();
