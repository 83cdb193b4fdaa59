#ifndef EVONET_DYNAMICS_HPP
#define EVONET_DYNAMICS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "evonet/datagen.hpp"
#include "evonet/topology.hpp"

namespace evonet {

using StateVector = std::vector<double>;

enum class Mode {
  kEvolutionary,  // average, then rewire, every round
  kFrozen,        // average on a topology previously evolved and then fixed
  kAutomaton,     // average on the untouched Moore lattice
};

enum class StopReason { kEpsilon, kMaxRounds, kThresholdsMet };

std::string_view to_string(Mode mode);
std::string_view to_string(StopReason reason);
std::optional<Mode> parse_mode(std::string_view text);

// 1e-1, 1e-2, ..., 1e-5
std::vector<double> default_thresholds();

struct RunConfig {
  Mode mode = Mode::kEvolutionary;
  std::vector<double> thresholds = default_thresholds();
  double stop_epsilon = 1e-12;
  std::size_t max_rounds = 200000;
  std::uint64_t topology_seed = 1;
  std::uint64_t data_seed = 2;
  // Frozen mode: evolve until b drops below this, then fix the network.
  double freeze_threshold = 1e-1;
  // Frozen mode: reuse data_seed for the fixed-network phase instead of a
  // fresh stream derived from it.
  bool reuse_data_seed = false;

  // Throws InvalidSpec: thresholds must be positive and strictly decreasing,
  // stop_epsilon and freeze_threshold positive.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

struct ConvergenceTrace {
  std::vector<double> thresholds;
  // b_per_round[0] is the metric of the initial data.
  std::vector<double> b_per_round;
  // Aligned with thresholds: first round index with b < threshold.
  std::vector<std::optional<std::size_t>> crossings;
  StopReason stop_reason = StopReason::kMaxRounds;

  std::size_t rounds() const {
    return b_per_round.empty() ? 0 : b_per_round.size() - 1;
  }
};

// Synchronous update: out[i] = (sum of in-neighbor values in slot order, then
// the node's own value) / (q + 1). `in` and `out` must not alias.
void average_step(const Topology& topology, std::span<const double> in,
                  std::span<double> out);
StateVector average_step(const Topology& topology, std::span<const double> in);

// Compensated (Neumaier) mean.
double mean_of(std::span<const double> values);

// Population standard deviation divided by the mean. Throws
// DegenerateMeanError when |mean| < 1e-30.
double convergence_b(std::span<const double> values);

// First round index with b < threshold, per threshold.
std::vector<std::optional<std::size_t>> threshold_crossings(
    std::span<const double> b_per_round, std::span<const double> thresholds);

// Invoked the first time b drops below each threshold, with the state of that
// round and the topology as it stands at the end of the round (after the
// round's rewiring pass in evolutionary mode).
using CrossingObserver =
    std::function<void(double threshold, std::size_t round,
                       const Topology& topology, std::span<const double> state)>;

struct RunResult {
  ConvergenceTrace trace;
  Topology topology;
  StateVector state;
  double initial_mean = 0.0;
  double final_mean = 0.0;
};

// Round loop. Each round averages synchronously on the current topology and,
// in evolutionary mode only, then runs one rewire_round seeded from
// config.topology_seed. Stops when every threshold is crossed, when
// |b_t - b_{t-1}| < stop_epsilon, or at max_rounds, checked in that order.
RunResult run(const RunConfig& config, Topology topology, StateVector init,
              const CrossingObserver& observer = {});

struct FrozenResult {
  ConvergenceTrace evolution_trace;
  std::size_t evolution_rounds = 0;
  std::uint64_t fixed_data_seed = 0;
  RunResult fixed;
};

// Seed used for the fixed-network phase of frozen_pipeline.
std::uint64_t fixed_phase_data_seed(const RunConfig& config);

// Evolves the Moore lattice from `dist` data until b < freeze_threshold,
// snapshots the network, then runs fresh `dist` data on the fixed snapshot.
// Throws PipelineError when the evolution phase never reaches the threshold.
FrozenResult frozen_pipeline(const RunConfig& config, const LatticeSpec& spec,
                             const DistributionSpec& dist,
                             const CrossingObserver& observer = {});

}  // namespace evonet

#endif  // EVONET_DYNAMICS_HPP
