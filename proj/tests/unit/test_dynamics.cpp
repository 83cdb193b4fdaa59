#include <doctest.h>

#include <cmath>
#include <limits>

#include "evonet/dynamics.hpp"
#include "evonet/error.hpp"
#include "oracles.hpp"

using namespace evonet;
namespace oracle = evonet::testing;

namespace {

std::vector<double> uniform_state(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.uniform_real();
  return x;
}

RunConfig config_for(Mode mode, std::uint64_t seed) {
  RunConfig c;
  c.mode = mode;
  c.topology_seed = seed;
  c.data_seed = seed + 1000;
  return c;
}

RunResult uniform_run(Mode mode, std::size_t m, std::uint64_t seed) {
  const RunConfig c = config_for(mode, seed);
  Rng data(c.data_seed);
  return run(c, build_moore_lattice({m, m, true}), generate(DistributionSpec{}, m, m, data));
}

}  // namespace

TEST_CASE("average_step keeps a constant state") {
  const Topology t = build_moore_lattice({7, 9, true});
  const std::vector<double> x(63, 3.25);
  CHECK(average_step(t, x) == x);
}

TEST_CASE("average_step on the complete 3x3 torus") {
  const Topology t = build_moore_lattice({3, 3, true});
  std::vector<double> x(9, 0.0);
  x[0] = 1.0;
  for (double v : average_step(t, x)) CHECK(v == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("average_step rejects mismatched lengths") {
  const Topology t = build_moore_lattice({3, 3, true});
  CHECK_THROWS_AS(average_step(t, std::vector<double>(8, 1.0)), PreconditionError);
}

TEST_CASE("average_step matches the dense doubly-stochastic oracle") {
  // 16-node q = 3 graph
  const Topology t = oracle::random_regular(16, 3, 99);
  REQUIRE(validate(t).empty());
  const auto w = oracle::averaging_matrix(t);
  for (std::size_t i = 0; i < 16; ++i) {
    double row = 0.0;
    double col = 0.0;
    for (std::size_t j = 0; j < 16; ++j) {
      row += w[i][j];
      col += w[j][i];
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(col == doctest::Approx(1.0).epsilon(1e-15));
  }
  const auto x = uniform_state(16, 5);
  const auto got = average_step(t, x);
  const auto want = oracle::multiply(w, x);
  for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-14);
}

TEST_CASE("k rounds equal W^k x on small random topologies") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t n = 9 + seed * 2;  // 11 .. 49
    const Topology t = oracle::random_regular(n, 8, seed);
    const auto w = oracle::averaging_matrix(t);
    std::vector<double> x = uniform_state(n, seed + 50);
    const std::size_t k = 1 + seed * 2;
    const auto want = oracle::matrix_power_apply(w, k, x);
    for (std::size_t r = 0; r < k; ++r) x = average_step(t, x);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x[i] - want[i]) <= 1e-12);
  }
}

TEST_CASE("average_step conserves the mean to within 4 ulps") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Topology t = seed % 2 ? oracle::random_regular(64, 8, seed)
                                : build_moore_lattice({8, 8, true});
    const auto x = uniform_state(64, seed);
    const double before = oracle::exact_mean(x);
    const double after = oracle::exact_mean(average_step(t, x));
    CHECK(std::abs(after - before) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(before));
  }
}

TEST_CASE("average_step is a pure function of its inputs") {
  const Topology t = oracle::random_regular(200, 8, 4);
  const auto x = uniform_state(200, 4);
  const auto a = average_step(t, x);
  const auto b = average_step(t, x);
  CHECK(a == b);
}

TEST_CASE("convergence_b") {
  CHECK(convergence_b(std::vector<double>(10, 4.0)) == 0.0);
  std::vector<double> half(10, 0.0);
  for (std::size_t i = 0; i < 5; ++i) half[i] = 2.0;
  CHECK(convergence_b(half) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(convergence_b(std::vector<double>{1.0, -1.0}), DegenerateMeanError);
  CHECK_THROWS_AS(convergence_b(std::vector<double>(4, 0.0)), DegenerateMeanError);
}

TEST_CASE("threshold_crossings") {
  const std::vector<double> b = {0.5, 0.05, 0.005};
  const std::vector<double> th = {1e-1, 1e-2};
  const auto c = threshold_crossings(b, th);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == 1);
  CHECK(c[1] == 2);
  const std::vector<double> deeper = {1e-1, 1e-2, 1e-3};
  CHECK_FALSE(threshold_crossings(b, deeper)[2].has_value());
  // a threshold already met by the initial data crosses at round 0
  const std::vector<double> loose = {1.0};
  CHECK(threshold_crossings(b, loose)[0] == 0);
}

TEST_CASE("recorded crossings agree with recomputation and are monotone") {
  for (Mode mode : {Mode::kEvolutionary, Mode::kAutomaton}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const RunResult r = uniform_run(mode, 16, seed);
      const auto again = threshold_crossings(r.trace.b_per_round, r.trace.thresholds);
      CHECK(again == r.trace.crossings);
      for (std::size_t k = 1; k < again.size(); ++k) {
        if (again[k] && again[k - 1]) CHECK(*again[k - 1] <= *again[k]);
      }
      CHECK(std::all_of(r.trace.b_per_round.begin(), r.trace.b_per_round.end(),
                        [](double b) { return b >= 0.0; }));
    }
  }
}

TEST_CASE("run stop reasons") {
  SUBCASE("evolutionary reaches every threshold") {
    const RunResult r = uniform_run(Mode::kEvolutionary, 32, 1);
    CHECK(r.trace.stop_reason == StopReason::kThresholdsMet);
    CHECK(r.trace.crossings.back() == r.trace.rounds());
  }
  SUBCASE("max_rounds") {
    RunConfig c = config_for(Mode::kAutomaton, 1);
    c.max_rounds = 5;
    Rng data(1);
    const RunResult r =
        run(c, build_moore_lattice({32, 32, true}), generate(DistributionSpec{}, 32, 32, data));
    CHECK(r.trace.stop_reason == StopReason::kMaxRounds);
    CHECK(r.trace.rounds() == 5);
  }
  SUBCASE("max_rounds of zero evaluates only the initial data") {
    RunConfig c = config_for(Mode::kAutomaton, 1);
    c.max_rounds = 0;
    const RunResult r = run(c, build_moore_lattice({4, 4, true}), uniform_state(16, 3));
    CHECK(r.trace.stop_reason == StopReason::kMaxRounds);
    CHECK(r.trace.rounds() == 0);
  }
  SUBCASE("epsilon") {
    // the per-round change falls below 1e-4 well before b reaches 1e-5
    RunConfig c = config_for(Mode::kAutomaton, 1);
    c.stop_epsilon = 1e-4;
    Rng data(2);
    const RunResult r =
        run(c, build_moore_lattice({40, 40, true}), generate(DistributionSpec{}, 40, 40, data));
    CHECK(r.trace.stop_reason == StopReason::kEpsilon);
    const auto& b = r.trace.b_per_round;
    CHECK(std::abs(b[b.size() - 1] - b[b.size() - 2]) < 1e-4);
    CHECK_FALSE(r.trace.crossings.back().has_value());
  }
  SUBCASE("thresholds already met at round 0") {
    RunConfig c = config_for(Mode::kEvolutionary, 1);
    c.thresholds = {10.0};
    const RunResult r = run(c, build_moore_lattice({4, 4, true}), uniform_state(16, 3));
    CHECK(r.trace.rounds() == 0);
    CHECK(r.trace.crossings[0] == 0);
  }
}

TEST_CASE("run validates its inputs") {
  RunConfig c;
  c.thresholds = {1e-2, 1e-1};
  CHECK_THROWS_AS(run(c, build_moore_lattice({4, 4, true}), uniform_state(16, 1)), InvalidSpec);
  c = RunConfig{};
  CHECK_THROWS_AS(run(c, build_moore_lattice({4, 4, true}), uniform_state(15, 1)),
                  PreconditionError);
  CHECK_THROWS_AS(run(c, build_moore_lattice({4, 4, true}), std::vector<double>(16, 0.0)),
                  DegenerateMeanError);
}

TEST_CASE("only evolutionary mode mutates the topology") {
  const Topology lattice = build_moore_lattice({16, 16, true});
  CHECK(uniform_run(Mode::kAutomaton, 16, 1).topology == lattice);
  CHECK(uniform_run(Mode::kFrozen, 16, 1).topology == lattice);
  const RunResult evolved = uniform_run(Mode::kEvolutionary, 16, 1);
  CHECK_FALSE(evolved.topology == lattice);
  CHECK(validate(evolved.topology).empty());
}

TEST_CASE("full runs are deterministic for fixed seeds") {
  const RunResult a = uniform_run(Mode::kEvolutionary, 32, 7);
  const RunResult b = uniform_run(Mode::kEvolutionary, 32, 7);
  CHECK(a.trace.b_per_round == b.trace.b_per_round);
  CHECK(a.state == b.state);
  CHECK(a.topology == b.topology);
  const RunResult c = uniform_run(Mode::kEvolutionary, 32, 8);
  CHECK(a.trace.b_per_round != c.trace.b_per_round);
}

TEST_CASE("each round averages on the topology left by the previous round") {
  RunConfig c = config_for(Mode::kEvolutionary, 3);
  c.max_rounds = 3;
  c.thresholds = {1e-9};
  const Topology lattice = build_moore_lattice({12, 12, true});
  const auto x0 = uniform_state(144, 9);
  const RunResult r = run(c, lattice, x0);

  Topology t = lattice;
  Rng rng(c.topology_seed);
  std::vector<double> x = x0;
  for (std::size_t round = 1; round <= 3; ++round) {
    x = average_step(t, x);
    rewire_round(t, rng, round);
    CHECK(r.trace.b_per_round[round] == convergence_b(x));
  }
  CHECK(r.state == x);
  CHECK(r.topology == t);
}

TEST_CASE("the observer sees the end-of-round topology at each first crossing") {
  RunConfig c = config_for(Mode::kEvolutionary, 5);
  std::vector<std::pair<double, std::size_t>> seen;
  std::vector<Topology> snapshots;
  Rng data(c.data_seed);
  const RunResult r = run(c, build_moore_lattice({16, 16, true}),
                          generate(DistributionSpec{}, 16, 16, data),
                          [&](double th, std::size_t round, const Topology& t, std::span<const double> s) {
                            seen.emplace_back(th, round);
                            snapshots.push_back(t);
                            CHECK(convergence_b(s) < th);
                          });
  REQUIRE(seen.size() == c.thresholds.size());
  for (std::size_t k = 0; k < seen.size(); ++k) {
    CHECK(seen[k].first == c.thresholds[k]);
    CHECK(seen[k].second == *r.trace.crossings[k]);
  }
  // the last crossing ends the run, so its snapshot is the final topology
  CHECK(snapshots.back() == r.topology);
}

TEST_CASE("the global mean is conserved through whole runs") {
  for (Mode mode : {Mode::kEvolutionary, Mode::kAutomaton}) {
    const RunResult r = uniform_run(mode, 32, 2);
    CHECK(std::abs(r.final_mean - r.initial_mean) < 1e-10 * std::abs(r.initial_mean));
  }
}

TEST_CASE("frozen pipeline") {
  RunConfig c = config_for(Mode::kFrozen, 4);
  const LatticeSpec spec{32, 32, true};

  SUBCASE("fixed phase runs on the network evolved to the freeze threshold") {
    c.freeze_threshold = 1e-1;
    const FrozenResult f = frozen_pipeline(c, spec, DistributionSpec{});
    CHECK(f.evolution_rounds >= 1);
    CHECK(f.evolution_trace.b_per_round[f.evolution_rounds] < 1e-1);
    CHECK(f.fixed_data_seed != c.data_seed);
    CHECK(validate(f.fixed.topology).empty());
    CHECK_FALSE(f.fixed.topology == build_moore_lattice(spec));
    CHECK(f.fixed.trace.stop_reason == StopReason::kThresholdsMet);
  }
  SUBCASE("a freeze threshold above the initial b equals the automaton") {
    c.freeze_threshold = 10.0;
    c.reuse_data_seed = true;
    const FrozenResult f = frozen_pipeline(c, spec, DistributionSpec{});
    CHECK(f.evolution_rounds == 0);
    RunConfig a = c;
    a.mode = Mode::kAutomaton;
    a.max_rounds = 400;
    c.max_rounds = 400;
    const FrozenResult capped = frozen_pipeline(c, spec, DistributionSpec{});
    Rng data(c.data_seed);
    const RunResult automaton =
        run(a, build_moore_lattice(spec), generate(DistributionSpec{}, 32, 32, data));
    CHECK(capped.fixed.trace.b_per_round == automaton.trace.b_per_round);
    CHECK(capped.fixed.trace.crossings == automaton.trace.crossings);
  }
  SUBCASE("evolution that cannot reach the freeze threshold is an error") {
    c.freeze_threshold = 1e-5;
    c.max_rounds = 2;
    CHECK_THROWS_AS(frozen_pipeline(c, spec, DistributionSpec{}), PipelineError);
  }
}
