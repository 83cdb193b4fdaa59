// Independent reference computations used only by tests. Nothing here calls
// the library's averaging, traversal or clustering code.
#ifndef EVONET_TESTS_ORACLES_HPP
#define EVONET_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <numeric>
#include <vector>

#include "evonet/rng.hpp"
#include "evonet/topology.hpp"

namespace evonet::testing {

using Dense = std::vector<std::vector<double>>;

// W[i][j] = 1/(q+1) for j in in(i) and for j == i.
inline Dense averaging_matrix(const Topology& t) {
  const std::size_t n = t.node_count();
  const double w = 1.0 / static_cast<double>(t.degree() + 1);
  Dense m(n, std::vector<double>(n, 0.0));
  for (NodeId i = 0; i < n; ++i) {
    m[i][i] += w;
    for (NodeId j : t.in_list(i)) m[i][j] += w;
  }
  return m;
}

inline std::vector<double> multiply(const Dense& m, const std::vector<double>& x) {
  std::vector<double> y(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    long double acc = 0.0L;
    for (std::size_t j = 0; j < x.size(); ++j) acc += static_cast<long double>(m[i][j]) * x[j];
    y[i] = static_cast<double>(acc);
  }
  return y;
}

inline Dense matmul(const Dense& a, const Dense& b) {
  const std::size_t n = a.size();
  Dense c(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a[i][k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c[i][j] += aik * b[k][j];
    }
  }
  return c;
}

// W^k x by repeated squaring of W, then one product with x.
inline std::vector<double> matrix_power_apply(const Dense& w, std::size_t k,
                                              const std::vector<double>& x) {
  const std::size_t n = w.size();
  Dense result(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) result[i][i] = 1.0;
  Dense base = w;
  while (k > 0) {
    if (k & 1) result = matmul(result, base);
    base = matmul(base, base);
    k >>= 1;
  }
  return multiply(result, x);
}

// q-regular circulant (in(i) = i+1 .. i+q mod n) scrambled by random
// in-entry exchanges that keep the graph simple and degrees exact. Built
// without the library's rewiring code.
inline Topology random_regular(std::size_t n, std::size_t q, std::uint64_t seed,
                               std::size_t exchanges = 0) {
  std::vector<std::vector<NodeId>> in(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 1; d <= q; ++d) in[i].push_back(static_cast<NodeId>((i + d) % n));
  }
  Rng rng(seed);
  if (exchanges == 0) exchanges = 20 * n * q;
  for (std::size_t e = 0; e < exchanges; ++e) {
    const auto i = static_cast<NodeId>(rng.uniform_index(n));
    const auto j = static_cast<NodeId>(rng.uniform_index(n));
    if (i == j) continue;
    const std::size_t pi = rng.uniform_index(q);
    const std::size_t pj = rng.uniform_index(q);
    const NodeId a = in[i][pi];
    const NodeId b = in[j][pj];
    if (a == b || b == i || a == j) continue;
    if (std::count(in[i].begin(), in[i].end(), b) || std::count(in[j].begin(), in[j].end(), a)) {
      continue;
    }
    in[i][pi] = b;
    in[j][pj] = a;
  }
  std::vector<NodeId> flat;
  for (const auto& list : in) flat.insert(flat.end(), list.begin(), list.end());
  return Topology(n, q, std::move(flat));
}

struct Distances {
  std::size_t diameter = 0;
  double cpl = 0.0;
  bool strongly_connected = true;
};

// Queue BFS from every source along j -> i for j in in(i).
inline Distances all_pairs_bfs(const Topology& t) {
  const std::size_t n = t.node_count();
  std::vector<std::vector<NodeId>> out(n);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j : t.in_list(i)) out[j].push_back(i);
  }
  Distances d;
  std::uint64_t sum = 0;
  std::uint64_t pairs = 0;
  std::vector<std::size_t> dist(n);
  for (NodeId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<std::size_t>::max());
    dist[s] = 0;
    std::deque<NodeId> queue{s};
    while (!queue.empty()) {
      const NodeId v = queue.front();
      queue.pop_front();
      for (NodeId w : out[v]) {
        if (dist[w] == std::numeric_limits<std::size_t>::max()) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
      }
    }
    for (NodeId v = 0; v < n; ++v) {
      if (v == s) continue;
      if (dist[v] == std::numeric_limits<std::size_t>::max()) {
        d.strongly_connected = false;
        continue;
      }
      sum += dist[v];
      ++pairs;
      d.diameter = std::max(d.diameter, dist[v]);
    }
  }
  d.cpl = pairs == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(pairs);
  return d;
}

// Clustering on the undirected projection via an adjacency matrix.
inline double brute_clustering(const Topology& t) {
  const std::size_t n = t.node_count();
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j : t.in_list(i)) {
      if (i != j) adj[i][j] = adj[j][i] = 1;
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> nb;
    for (std::size_t j = 0; j < n; ++j) {
      if (adj[i][j]) nb.push_back(j);
    }
    if (nb.size() < 2) continue;
    std::size_t links = 0;
    for (std::size_t a = 0; a < nb.size(); ++a) {
      for (std::size_t b = a + 1; b < nb.size(); ++b) links += adj[nb[a]][nb[b]];
    }
    total += static_cast<double>(links) /
             (static_cast<double>(nb.size()) * static_cast<double>(nb.size() - 1) / 2.0);
  }
  return total / static_cast<double>(n);
}

// Out-degree per node counted over distinct in-lists.
inline std::vector<std::size_t> out_degrees(const Topology& t) {
  std::vector<std::size_t> deg(t.node_count(), 0);
  for (NodeId i = 0; i < t.node_count(); ++i) {
    for (NodeId j : t.in_list(i)) ++deg[j];
  }
  return deg;
}

inline double exact_mean(const std::vector<double>& x) {
  long double s = 0.0L;
  for (double v : x) s += v;
  return static_cast<double>(s / static_cast<long double>(x.size()));
}

}  // namespace evonet::testing

#endif  // EVONET_TESTS_ORACLES_HPP
