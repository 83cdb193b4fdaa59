#include <benchmark/benchmark.h>

#include "evonet/analytics.hpp"
#include "evonet/datagen.hpp"
#include "evonet/dynamics.hpp"
#include "evonet/topology.hpp"

namespace {

using namespace evonet;

void BM_AverageStep(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Topology t = build_moore_lattice({m, m, true});
  Rng rng(1);
  std::vector<double> in = generate(DistributionSpec{}, m, m, rng);
  std::vector<double> out(in.size());
  for (auto _ : state) {
    average_step(t, in, out);
    std::swap(in, out);
    benchmark::DoNotOptimize(in.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m * m));
}
BENCHMARK(BM_AverageStep)->Arg(32)->Arg(100)->Arg(320)->Arg(1000);

void BM_RewireRound(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  Topology t = build_moore_lattice({m, m, true});
  Rng rng(1);
  std::size_t round = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rewire_round(t, rng, round++));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m * m));
}
BENCHMARK(BM_RewireRound)->Arg(32)->Arg(100)->Arg(320)->Arg(1000);

void BM_ShortestPathStats(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  Topology t = build_moore_lattice({m, m, true});
  Rng rng(1);
  for (std::size_t r = 0; r < 10; ++r) rewire_round(t, rng, r);
  for (auto _ : state) benchmark::DoNotOptimize(shortest_path_stats(t));
}
BENCHMARK(BM_ShortestPathStats)->Arg(32)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_EvolutionaryRun(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Topology lattice = build_moore_lattice({m, m, true});
  Rng rng(2);
  const std::vector<double> x0 = generate(DistributionSpec{}, m, m, rng);
  const RunConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(run(config, lattice, x0).trace.rounds());
}
BENCHMARK(BM_EvolutionaryRun)->Arg(32)->Arg(320)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
