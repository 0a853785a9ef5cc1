#include <benchmark/benchmark.h>

#include "kselect/audit.hpp"

using namespace kselect;

namespace {

void BM_ExactMrpDistribution(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DirectedGraph g = gen_single_edge(n);
  const MechanismSpec spec{MechanismKind::Mrp, 1, 2};
  for (auto _ : state) {
    auto dist = exact_distribution(spec, g);
    benchmark::DoNotOptimize(dist);
  }
  state.SetComplexityN(std::int64_t(1) << n);
}
BENCHMARK(BM_ExactMrpDistribution)->DenseRange(8, 14, 2)->Complexity(benchmark::oN);

void BM_ExactSlidingPartition(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DirectedGraph g = gen_random(n, 0.3, 7);
  const MechanismSpec spec{MechanismKind::SlidingPartition, 1, 0};
  for (auto _ : state) {
    auto dist = exact_distribution(spec, g);
    benchmark::DoNotOptimize(dist);
  }
  state.SetComplexityN(std::int64_t(1) << n);
}
BENCHMARK(BM_ExactSlidingPartition)->DenseRange(8, 14, 2)->Complexity(benchmark::oN);

void BM_ImpossibilitySearchFull(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto result = impossibility_search(4, k);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_ImpossibilitySearchFull)->DenseRange(1, 3);

void BM_CheckSpAllGraphs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MechanismSpec spec{MechanismKind::Mrp, 1, 2};
  for (auto _ : state) {
    auto report = check_sp(spec, n, GraphScope::all());
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_CheckSpAllGraphs)->DenseRange(2, 4);

void BM_MrpSample(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const DirectedGraph g = gen_random(300, 0.1, 0);
  const MechanismSpec spec{MechanismKind::Mrp, k, ceil_cube_root(k)};
  std::uint64_t trial = 0;
  for (auto _ : state) {
    Rng rng(derive_seed(1, trial++));
    auto sel = sample_mechanism(spec, g, rng);
    benchmark::DoNotOptimize(sel);
  }
}
BENCHMARK(BM_MrpSample)->Arg(8)->Arg(27)->Arg(64);

void BM_SlidingSample(benchmark::State& state) {
  const int t = static_cast<int>(state.range(0));
  const DirectedGraph g = gen_sliding_counterexample(t, t);
  std::uint64_t trial = 0;
  for (auto _ : state) {
    Rng rng(derive_seed(2, trial++));
    auto sel = sliding_partition_draw(g, rng);
    benchmark::DoNotOptimize(sel);
  }
}
BENCHMARK(BM_SlidingSample)->Arg(4)->Arg(8)->Arg(16);

void BM_ApproxRatioMc(benchmark::State& state) {
  const DirectedGraph g = gen_random(100, 0.1, 3);
  const MechanismSpec spec{MechanismKind::Mrp, 8, 2};
  for (auto _ : state) {
    auto est = approx_ratio_mc(spec, g, static_cast<std::uint64_t>(state.range(0)), 0);
    benchmark::DoNotOptimize(est);
  }
}
BENCHMARK(BM_ApproxRatioMc)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
