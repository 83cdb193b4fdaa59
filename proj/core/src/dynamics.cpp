#include "evonet/dynamics.hpp"

#include <cmath>
#include <utility>

#include "evonet/error.hpp"

namespace evonet {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kEvolutionary: return "evolutionary";
    case Mode::kFrozen: return "frozen";
    case Mode::kAutomaton: return "automaton";
  }
  return "unknown";
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kEpsilon: return "epsilon";
    case StopReason::kMaxRounds: return "max_rounds";
    case StopReason::kThresholdsMet: return "thresholds_met";
  }
  return "unknown";
}

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "evolutionary") return Mode::kEvolutionary;
  if (text == "frozen") return Mode::kFrozen;
  if (text == "automaton") return Mode::kAutomaton;
  return std::nullopt;
}

std::vector<double> default_thresholds() { return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}; }

void RunConfig::validate() const {
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    if (!(thresholds[k] > 0.0)) throw InvalidSpec("thresholds must be positive");
    if (k > 0 && !(thresholds[k] < thresholds[k - 1])) {
      throw InvalidSpec("thresholds must be strictly decreasing");
    }
  }
  if (!(stop_epsilon > 0.0)) throw InvalidSpec("stop_epsilon must be positive");
  if (!(freeze_threshold > 0.0)) throw InvalidSpec("freeze_threshold must be positive");
}

void average_step(const Topology& topology, std::span<const double> in,
                  std::span<double> out) {
  const std::size_t n = topology.node_count();
  if (in.size() != n || out.size() != n) {
    throw PreconditionError("state length " + std::to_string(in.size()) +
                            " does not match " + std::to_string(n) + " nodes");
  }
  const double scale = 1.0 / static_cast<double>(topology.degree() + 1);
  const NodeId* entry = topology.entries().data();
  const std::size_t q = topology.degree();
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t s = 0; s < q; ++s) sum += in[entry[s]];
    sum += in[i];
    out[i] = sum * scale;
    entry += q;
  }
}

StateVector average_step(const Topology& topology, std::span<const double> in) {
  StateVector out(in.size());
  average_step(topology, in, out);
  return out;
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return (sum + carry) / static_cast<double>(values.size());
}

double convergence_b(std::span<const double> values) {
  const double mean = mean_of(values);
  if (!(std::abs(mean) >= 1e-30)) {
    throw DegenerateMeanError("b is undefined for a state with mean " +
                              std::to_string(mean));
  }
  double sq = 0.0;
  for (double v : values) {
    const double d = v - mean;
    sq += d * d;
  }
  const double sd = std::sqrt(sq / static_cast<double>(values.size()));
  return sd / mean;
}

std::vector<std::optional<std::size_t>> threshold_crossings(
    std::span<const double> b_per_round, std::span<const double> thresholds) {
  std::vector<std::optional<std::size_t>> out(thresholds.size());
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    for (std::size_t t = 0; t < b_per_round.size(); ++t) {
      if (b_per_round[t] < thresholds[k]) {
        out[k] = t;
        break;
      }
    }
  }
  return out;
}

namespace {

// Records first crossings for round `t`; returns true once all are crossed.
bool note_crossings(ConvergenceTrace& trace, std::size_t t, double b,
                    const Topology& topology, std::span<const double> state,
                    const CrossingObserver& observer) {
  bool all = true;
  for (std::size_t k = 0; k < trace.thresholds.size(); ++k) {
    if (!trace.crossings[k] && b < trace.thresholds[k]) {
      trace.crossings[k] = t;
      if (observer) observer(trace.thresholds[k], t, topology, state);
    }
    all = all && trace.crossings[k].has_value();
  }
  return all;
}

}  // namespace

RunResult run(const RunConfig& config, Topology topology, StateVector init,
              const CrossingObserver& observer) {
  config.validate();
  if (init.size() != topology.node_count()) {
    throw PreconditionError("initial state has " + std::to_string(init.size()) +
                            " values for " +
                            std::to_string(topology.node_count()) + " nodes");
  }

  RunResult result;
  ConvergenceTrace& trace = result.trace;
  trace.thresholds = config.thresholds;
  trace.crossings.assign(config.thresholds.size(), std::nullopt);
  result.initial_mean = mean_of(init);

  StateVector current = std::move(init);
  StateVector next(current.size());
  double b = convergence_b(current);
  trace.b_per_round.push_back(b);

  const bool evolve = config.mode == Mode::kEvolutionary;
  Rng rng(config.topology_seed);

  if (note_crossings(trace, 0, b, topology, current, observer)) {
    trace.stop_reason = StopReason::kThresholdsMet;
  } else if (config.max_rounds == 0) {
    trace.stop_reason = StopReason::kMaxRounds;
  } else {
    for (std::size_t round = 1;; ++round) {
      average_step(topology, current, next);
      std::swap(current, next);
      if (evolve) rewire_round(topology, rng, round);
      const double previous = b;
      b = convergence_b(current);
      trace.b_per_round.push_back(b);
      if (note_crossings(trace, round, b, topology, current, observer)) {
        trace.stop_reason = StopReason::kThresholdsMet;
        break;
      }
      if (std::abs(b - previous) < config.stop_epsilon) {
        trace.stop_reason = StopReason::kEpsilon;
        break;
      }
      if (round >= config.max_rounds) {
        trace.stop_reason = StopReason::kMaxRounds;
        break;
      }
    }
  }

  result.final_mean = mean_of(current);
  result.state = std::move(current);
  result.topology = std::move(topology);
  return result;
}

std::uint64_t fixed_phase_data_seed(const RunConfig& config) {
  return config.reuse_data_seed ? config.data_seed : mix_seed(config.data_seed, 1);
}

FrozenResult frozen_pipeline(const RunConfig& config, const LatticeSpec& spec,
                             const DistributionSpec& dist,
                             const CrossingObserver& observer) {
  config.validate();
  RunConfig evolve = config;
  evolve.mode = Mode::kEvolutionary;
  evolve.thresholds = {config.freeze_threshold};

  Rng data_rng(config.data_seed);
  RunResult grown = run(evolve, build_moore_lattice(spec),
                        generate(dist, spec.rows, spec.cols, data_rng));
  if (!grown.trace.crossings.front()) {
    throw PipelineError("evolution stopped (" +
                        std::string(to_string(grown.trace.stop_reason)) +
                        ") before b fell below the freeze threshold");
  }

  FrozenResult result;
  result.evolution_rounds = *grown.trace.crossings.front();
  result.evolution_trace = std::move(grown.trace);
  result.fixed_data_seed = fixed_phase_data_seed(config);

  RunConfig fixed = config;
  fixed.mode = Mode::kFrozen;
  Rng fixed_rng(result.fixed_data_seed);
  result.fixed = run(fixed, std::move(grown.topology),
                     generate(dist, spec.rows, spec.cols, fixed_rng), observer);
  return result;
}

}  // namespace evonet
