#include "evonet/topology.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "evonet/error.hpp"

namespace evonet {
namespace {

bool contains(std::span<const NodeId> list, NodeId value) {
  return std::find(list.begin(), list.end(), value) != list.end();
}

void check_node(const Topology& t, NodeId v, const char* what) {
  if (v >= t.node_count()) {
    throw PreconditionError(std::string(what) + " " + std::to_string(v) +
                            " out of range for " +
                            std::to_string(t.node_count()) + " nodes");
  }
}

void check_slot(const Topology& t, std::size_t slot) {
  if (slot >= t.degree()) {
    throw PreconditionError("slot " + std::to_string(slot) +
                            " out of range for degree " +
                            std::to_string(t.degree()));
  }
}

void require_valid(const Topology& t, const char* op) {
  if (!validate(t).empty()) {
    throw PreconditionError(std::string(op) + " requires a valid topology");
  }
}

}  // namespace

Topology::Topology(std::size_t n_nodes, std::size_t q,
                   std::vector<NodeId> in_entries)
    : n_nodes_(n_nodes), q_(q), in_(std::move(in_entries)) {
  if (in_.size() != n_nodes_ * q_) {
    throw InvalidSpec("topology needs " + std::to_string(n_nodes_ * q_) +
                      " in-entries, got " + std::to_string(in_.size()));
  }
  if (n_nodes_ > std::numeric_limits<NodeId>::max()) {
    throw InvalidSpec("too many nodes");
  }
}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::kOutOfRange: return "out_of_range";
    case Rule::kSelfLoop: return "self_loop";
    case Rule::kDuplicateEntry: return "duplicate_entry";
    case Rule::kOutDegree: return "out_degree";
  }
  return "unknown";
}

std::vector<Violation> validate(const Topology& topology) {
  std::vector<Violation> violations;
  const std::size_t n = topology.node_count();
  const std::size_t q = topology.degree();
  std::vector<std::size_t> appearances(n, 0);

  for (NodeId i = 0; i < n; ++i) {
    auto list = topology.in_list(i);
    for (std::size_t s = 0; s < q; ++s) {
      const NodeId v = list[s];
      if (v >= n) {
        violations.push_back({i, s, Rule::kOutOfRange,
                              "entry " + std::to_string(v) + " is not a node"});
        continue;
      }
      if (v == i) {
        violations.push_back({i, s, Rule::kSelfLoop, "node reads itself"});
      }
      if (contains(list.first(s), v)) {
        violations.push_back({i, s, Rule::kDuplicateEntry,
                              "entry " + std::to_string(v) + " repeated"});
        continue;
      }
      ++appearances[v];
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    if (appearances[v] != q) {
      violations.push_back({v, std::nullopt, Rule::kOutDegree,
                            "appears in " + std::to_string(appearances[v]) +
                                " in-lists, expected " + std::to_string(q)});
    }
  }
  return violations;
}

Topology build_moore_lattice(const LatticeSpec& spec) {
  if (!spec.periodic) {
    throw InvalidSpec(
        "non-periodic lattices leave boundary cells with fewer than 8 "
        "neighbors");
  }
  if (spec.rows < 3 || spec.cols < 3) {
    throw InvalidSpec("periodic Moore lattice needs rows and cols >= 3");
  }
  if (spec.node_count() >= std::numeric_limits<NodeId>::max()) {
    throw InvalidSpec("lattice too large");
  }
  const std::size_t m = spec.rows;
  const std::size_t n = spec.cols;
  std::vector<NodeId> in;
  in.reserve(m * n * kMooreDegree);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const std::size_t rr = (r + m + dr) % m;
          const std::size_t cc = (c + n + dc) % n;
          in.push_back(spec.node_at(rr, cc));
        }
      }
    }
  }
  return Topology(m * n, kMooreDegree, std::move(in));
}

bool swap_in_entries(Topology& topology, NodeId i, std::size_t pos_i, NodeId j,
                     std::size_t pos_j) {
  check_node(topology, i, "node");
  check_node(topology, j, "node");
  check_slot(topology, pos_i);
  check_slot(topology, pos_j);
  if (i == j) throw PreconditionError("swap_in_entries needs two distinct nodes");

  const NodeId a = topology.entry(i, pos_i);
  const NodeId b = topology.entry(j, pos_j);
  if (a == b) return false;
  if (b == i || a == j) return false;
  // a != b, so b found anywhere in i's list is a duplicate after the swap.
  if (contains(topology.in_list(i), b)) return false;
  if (contains(topology.in_list(j), a)) return false;

  topology.set_entry(i, pos_i, b);
  topology.set_entry(j, pos_j, a);
  return true;
}

std::size_t rewire_round(Topology& topology, Rng& rng, std::size_t round,
                         std::vector<RewireEvent>* log) {
  const std::size_t n = topology.node_count();
  const std::size_t q = topology.degree();
  if (n < 2 || q == 0) return 0;
  std::size_t accepted = 0;
  for (NodeId i = 0; i < n; ++i) {
    for (int attempt = 0; attempt <= kRewireRedraws; ++attempt) {
      auto j = static_cast<NodeId>(rng.uniform_index(n - 1));
      if (j >= i) ++j;
      const std::size_t pos_i = rng.uniform_index(q);
      const std::size_t pos_j = rng.uniform_index(q);
      const bool ok = swap_in_entries(topology, i, pos_i, j, pos_j);
      if (log) log->push_back({round, i, j, pos_i, pos_j, ok});
      if (ok) {
        ++accepted;
        break;
      }
    }
  }
  return accepted;
}

namespace {

constexpr int kChurnRedraws = 16;
constexpr int kRepairPasses = 64;

// Drops node v and renumbers the nodes above it. No list may still hold v.
Topology compact_without(const Topology& t, NodeId v) {
  const std::size_t n = t.node_count();
  const std::size_t q = t.degree();
  std::vector<NodeId> in;
  in.reserve((n - 1) * q);
  for (NodeId i = 0; i < n; ++i) {
    if (i == v) continue;
    for (NodeId e : t.in_list(i)) in.push_back(e > v ? e - 1 : e);
  }
  return Topology(n - 1, q, std::move(in));
}

}  // namespace

Topology delete_node(const Topology& topology, NodeId v, Rng& rng) {
  check_node(topology, v, "node");
  const std::size_t n = topology.node_count();
  const std::size_t q = topology.degree();
  if (n <= q + 1) {
    throw PreconditionError("deleting from " + std::to_string(n) +
                            " nodes would leave too few for degree " +
                            std::to_string(q));
  }
  require_valid(topology, "delete_node");

  struct Reader {
    NodeId node;
    std::size_t slot;
  };
  std::vector<Reader> readers;
  readers.reserve(q);
  for (NodeId r = 0; r < n; ++r) {
    auto list = topology.in_list(r);
    auto it = std::find(list.begin(), list.end(), v);
    if (it != list.end()) {
      readers.push_back({r, static_cast<std::size_t>(it - list.begin())});
    }
  }
  const auto sources = topology.in_list(v);

  // One pass: random matching with redraws, then per-pair repair. A pass can
  // dead-end on dense graphs, in which case it restarts from scratch.
  auto attempt_pass = [&](Topology& work) {
    auto fits = [&](const Reader& r, NodeId s) {
      return s != r.node && !contains(work.in_list(r.node), s);
    };

    std::vector<std::size_t> match(q);
    bool matched = false;
    for (int attempt = 0; attempt <= kChurnRedraws && !matched; ++attempt) {
      std::iota(match.begin(), match.end(), 0);
      for (std::size_t k = q; k > 1; --k) {
        std::swap(match[k - 1], match[rng.uniform_index(k)]);
      }
      matched = true;
      for (std::size_t k = 0; k < q; ++k) {
        if (!fits(readers[k], sources[match[k]])) {
          matched = false;
          break;
        }
      }
    }

    std::vector<std::size_t> offending;
    for (std::size_t k = 0; k < q; ++k) {
      const NodeId s = sources[match[k]];
      if (fits(readers[k], s)) {
        work.set_entry(readers[k].node, readers[k].slot, s);
      } else {
        offending.push_back(k);
      }
    }

    // Repair: source s still needs one reader and reader r one source. Move s
    // into a slot of some node x and hand x's displaced entry y to r.
    // Every out-degree is unchanged: s gains x, y trades x for r.
    for (std::size_t k : offending) {
      const Reader& r = readers[k];
      const NodeId s = sources[match[k]];
      std::vector<std::pair<NodeId, std::size_t>> moves;
      for (NodeId x = 0; x < n; ++x) {
        if (x == v || x == r.node || x == s || contains(work.in_list(x), s)) continue;
        for (std::size_t p = 0; p < q; ++p) {
          const NodeId y = work.entry(x, p);
          if (y == v || y == r.node || contains(work.in_list(r.node), y)) continue;
          moves.emplace_back(x, p);
        }
      }
      if (moves.empty()) return false;
      const auto [x, p] = moves[rng.uniform_index(moves.size())];
      work.set_entry(r.node, r.slot, work.entry(x, p));
      work.set_entry(x, p, s);
    }
    return true;
  };

  for (int pass = 0; pass < kRepairPasses; ++pass) {
    Topology work = topology;
    if (attempt_pass(work)) return compact_without(work, v);
  }
  throw PipelineError("delete_node could not rewire the readers of node " +
                      std::to_string(v));
}

Insertion insert_node(const Topology& topology, Rng& rng) {
  const std::size_t n = topology.node_count();
  const std::size_t q = topology.degree();
  if (n < q + 1) throw PreconditionError("insert_node needs at least q + 1 nodes");
  require_valid(topology, "insert_node");

  const auto u = static_cast<NodeId>(n);
  std::vector<NodeId> sponsors;
  std::vector<std::size_t> slots(q);
  std::vector<NodeId> donated(q);

  auto draw_sponsors = [&] {
    sponsors.clear();
    while (sponsors.size() < q) {
      const auto k = static_cast<NodeId>(rng.uniform_index(n));
      if (!contains(sponsors, k)) sponsors.push_back(k);
    }
  };

  bool distinct = false;
  for (int attempt = 0; attempt <= kChurnRedraws && !distinct; ++attempt) {
    draw_sponsors();
    for (std::size_t k = 0; k < q; ++k) {
      slots[k] = rng.uniform_index(q);
      donated[k] = topology.entry(sponsors[k], slots[k]);
    }
    std::vector<NodeId> sorted = donated;
    std::sort(sorted.begin(), sorted.end());
    distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
  }

  if (!distinct) {
    // Repair: walk the sponsors in order and let each donate a random entry
    // not yet taken. A sponsor holds q distinct entries and fewer than q are
    // taken before it, so a free entry always exists.
    for (std::size_t k = 0; k < q; ++k) {
      const std::span<const NodeId> taken(donated.data(), k);
      if (!contains(taken, donated[k])) continue;
      std::vector<std::size_t> free_slots;
      for (std::size_t p = 0; p < q; ++p) {
        if (!contains(taken, topology.entry(sponsors[k], p))) free_slots.push_back(p);
      }
      slots[k] = free_slots[rng.uniform_index(free_slots.size())];
      donated[k] = topology.entry(sponsors[k], slots[k]);
    }
  }

  std::vector<NodeId> in(topology.entries().begin(), topology.entries().end());
  for (std::size_t k = 0; k < q; ++k) in[sponsors[k] * q + slots[k]] = u;
  in.insert(in.end(), donated.begin(), donated.end());
  return {Topology(n + 1, q, std::move(in)), u};
}

}  // namespace evonet
