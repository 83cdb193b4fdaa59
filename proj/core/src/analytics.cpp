#include "evonet/analytics.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>

#include "evonet/error.hpp"

namespace evonet {
namespace {

// Sources traversed together: one bit per source, kWords 64-bit words.
constexpr std::size_t kWords = 8;
constexpr std::size_t kBatch = 64 * kWords;
using Block = std::array<std::uint64_t, kWords>;

struct Accumulator {
  std::uint64_t distance_sum = 0;
  std::uint64_t reachable_pairs = 0;
  std::size_t diameter = 0;
  bool all_reached = true;
};

// Level-synchronous BFS from up to kBatch sources at once. reached[i] has bit
// b set once source b can reach node i; node i pulls from its in-list because
// information travels j -> i.
void traverse_batch(const Topology& topology, std::span<const NodeId> sources,
                    std::vector<Block>& reached, std::vector<Block>& next,
                    Accumulator& acc) {
  const std::size_t n = topology.node_count();
  const std::size_t q = topology.degree();
  std::fill(reached.begin(), reached.end(), Block{});
  for (std::size_t b = 0; b < sources.size(); ++b) {
    reached[sources[b]][b / 64] |= std::uint64_t{1} << (b % 64);
  }

  // A node that every source already reaches cannot change again.
  Block full{};
  for (std::size_t b = 0; b < sources.size(); ++b) {
    full[b / 64] |= std::uint64_t{1} << (b % 64);
  }

  for (std::size_t level = 1;; ++level) {
    std::uint64_t fresh_count = 0;
    const NodeId* entry = topology.entries().data();
    for (std::size_t i = 0; i < n; ++i, entry += q) {
      Block acc_block = reached[i];
      if (acc_block == full) {
        next[i] = acc_block;
        continue;
      }
      for (std::size_t s = 0; s < q; ++s) {
        const Block& from = reached[entry[s]];
        for (std::size_t w = 0; w < kWords; ++w) acc_block[w] |= from[w];
      }
      if (acc_block != reached[i]) {
        for (std::size_t w = 0; w < kWords; ++w) {
          fresh_count += static_cast<std::uint64_t>(
              std::popcount(acc_block[w] & ~reached[i][w]));
        }
      }
      next[i] = acc_block;
    }
    if (fresh_count == 0) break;
    acc.distance_sum += fresh_count * level;
    acc.reachable_pairs += fresh_count;
    acc.diameter = std::max(acc.diameter, level);
    reached.swap(next);
  }

  const std::uint64_t expected =
      static_cast<std::uint64_t>(sources.size()) * (n - 1);
  // reachable_pairs is cumulative across batches; check this batch alone.
  std::uint64_t batch_pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t w = 0; w < kWords; ++w) {
      batch_pairs += static_cast<std::uint64_t>(std::popcount(reached[i][w]));
    }
  }
  if (batch_pairs - sources.size() != expected) acc.all_reached = false;
}

MetricsReport traverse(const Topology& topology, std::span<const NodeId> sources) {
  const std::size_t n = topology.node_count();
  MetricsReport report;
  if (n == 0) return report;
  std::vector<Block> reached(n);
  std::vector<Block> next(n);
  Accumulator acc;
  for (std::size_t start = 0; start < sources.size(); start += kBatch) {
    const std::size_t count = std::min(kBatch, sources.size() - start);
    traverse_batch(topology, sources.subspan(start, count), reached, next, acc);
  }
  report.diameter = acc.diameter;
  report.reachable_pairs = acc.reachable_pairs;
  report.cpl = acc.reachable_pairs == 0
                   ? 0.0
                   : static_cast<double>(acc.distance_sum) /
                         static_cast<double>(acc.reachable_pairs);
  report.strongly_connected = acc.all_reached;
  report.clustering = clustering_coefficient(topology);
  return report;
}

}  // namespace

double clustering_coefficient(const Topology& topology) {
  const std::size_t n = topology.node_count();
  if (n == 0) return 0.0;
  std::vector<std::vector<NodeId>> adj(n);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j : topology.in_list(i)) {
      if (j == i || j >= n) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  double total = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    const auto& nbrs = adj[i];
    const std::size_t k = nbrs.size();
    if (k < 2) continue;
    std::size_t links = 0;
    for (NodeId a : nbrs) {
      const auto& other = adj[a];
      // Count neighbors of a that are also neighbors of i.
      auto x = nbrs.begin();
      auto y = other.begin();
      while (x != nbrs.end() && y != other.end()) {
        if (*x < *y) {
          ++x;
        } else if (*y < *x) {
          ++y;
        } else {
          ++links;
          ++x;
          ++y;
        }
      }
    }
    // Each link among neighbors was counted from both ends.
    total += static_cast<double>(links / 2) /
             (static_cast<double>(k) * static_cast<double>(k - 1) / 2.0);
  }
  return total / static_cast<double>(n);
}

MetricsReport shortest_path_stats(const Topology& topology) {
  std::vector<NodeId> sources(topology.node_count());
  std::iota(sources.begin(), sources.end(), NodeId{0});
  return traverse(topology, sources);
}

MetricsReport sampled_cpl(const Topology& topology, std::size_t sample_size,
                          Rng& rng) {
  if (sample_size == 0) throw PreconditionError("sample_size must be >= 1");
  const std::size_t n = topology.node_count();
  std::vector<NodeId> pool(n);
  std::iota(pool.begin(), pool.end(), NodeId{0});
  const std::size_t k = std::min(sample_size, n);
  for (std::size_t t = 0; t < k; ++t) {
    std::swap(pool[t], pool[t + rng.uniform_index(n - t)]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  MetricsReport report = traverse(topology, pool);
  report.sample_size = k;
  return report;
}

MetricsReport measure(const Topology& topology, const MetricsOptions& options) {
  if (topology.node_count() <= options.exact_node_budget) {
    return shortest_path_stats(topology);
  }
  Rng rng(options.seed);
  return sampled_cpl(topology, options.sample_size, rng);
}

LatticeDistances lattice_metrics_oracle(std::size_t rows, std::size_t cols) {
  if (rows < 3 || cols < 3) throw InvalidSpec("lattice oracle needs rows and cols >= 3");
  std::uint64_t sum = 0;
  for (std::size_t dr = 0; dr < rows; ++dr) {
    const std::size_t row_dist = std::min(dr, rows - dr);
    for (std::size_t dc = 0; dc < cols; ++dc) {
      sum += std::max(row_dist, std::min(dc, cols - dc));
    }
  }
  return {std::max(rows / 2, cols / 2),
          static_cast<double>(sum) / static_cast<double>(rows * cols - 1)};
}

}  // namespace evonet
