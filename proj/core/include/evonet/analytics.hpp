#ifndef EVONET_ANALYTICS_HPP
#define EVONET_ANALYTICS_HPP

#include <cstddef>
#include <cstdint>

#include "evonet/rng.hpp"
#include "evonet/topology.hpp"

namespace evonet {

struct MetricsReport {
  // Largest finite distance seen. A lower bound when sample_size > 0.
  std::size_t diameter = 0;
  // Mean distance over reachable ordered pairs (self-pairs excluded).
  double cpl = 0.0;
  double clustering = 0.0;
  // False if any traversed source failed to reach some node.
  bool strongly_connected = true;
  // 0 for exact all-pairs traversal, otherwise the number of sampled sources.
  std::size_t sample_size = 0;
  std::uint64_t reachable_pairs = 0;

  bool exact() const { return sample_size == 0; }
};

// Mean local clustering on the undirected simple projection; nodes with fewer
// than two neighbors contribute 0.
double clustering_coefficient(const Topology& topology);

// Exact all-pairs distances along the direction of information flow
// (j -> i for j in in_list(i)), plus clustering.
MetricsReport shortest_path_stats(const Topology& topology);

// Distances from `sample_size` sources drawn without replacement; a sample
// covering every node yields the exact values.
MetricsReport sampled_cpl(const Topology& topology, std::size_t sample_size,
                          Rng& rng);

struct MetricsOptions {
  // Exact traversal up to this many nodes, sampling beyond.
  std::size_t exact_node_budget = 200000;
  std::size_t sample_size = 1000;
  std::uint64_t seed = 1;

  bool operator==(const MetricsOptions&) const = default;
};

MetricsReport measure(const Topology& topology, const MetricsOptions& options = {});

struct LatticeDistances {
  std::size_t diameter = 0;
  double cpl = 0.0;
};

// Closed-form distances of the periodic Moore lattice from wrapped Chebyshev
// offsets. Throws InvalidSpec for rows or cols < 3.
LatticeDistances lattice_metrics_oracle(std::size_t rows, std::size_t cols);

}  // namespace evonet

#endif  // EVONET_ANALYTICS_HPP
