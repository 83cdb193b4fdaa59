#ifndef EVONET_TOPOLOGY_HPP
#define EVONET_TOPOLOGY_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evonet/rng.hpp"

namespace evonet {

using NodeId = std::uint32_t;

inline constexpr std::size_t kMooreDegree = 8;

// m x n grid of sites; node (r, c) has index r * cols + c.
struct LatticeSpec {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool periodic = true;

  std::size_t node_count() const { return rows * cols; }
  NodeId node_at(std::size_t r, std::size_t c) const {
    return static_cast<NodeId>(r * cols + c);
  }

  bool operator==(const LatticeSpec&) const = default;
};

// Directed q-regular network stored as per-node ordered in-neighbor lists.
// in_list(i) holds the q nodes whose values node i reads; information flows
// j -> i for every j in in_list(i).
//
// The container only enforces its shape (n_nodes * q entries). The remaining
// invariants (no self-loops, no duplicate entries, out-degree q) are checked
// by validate() and preserved by every mutating operation in this header.
class Topology {
 public:
  Topology() = default;
  Topology(std::size_t n_nodes, std::size_t q, std::vector<NodeId> in_entries);

  std::size_t node_count() const { return n_nodes_; }
  std::size_t degree() const { return q_; }
  std::size_t edge_count() const { return in_.size(); }

  std::span<const NodeId> in_list(NodeId i) const {
    return {in_.data() + static_cast<std::size_t>(i) * q_, q_};
  }
  NodeId entry(NodeId i, std::size_t slot) const {
    return in_[static_cast<std::size_t>(i) * q_ + slot];
  }
  void set_entry(NodeId i, std::size_t slot, NodeId value) {
    in_[static_cast<std::size_t>(i) * q_ + slot] = value;
  }

  // All lists concatenated in node order.
  std::span<const NodeId> entries() const { return in_; }

  bool operator==(const Topology&) const = default;

 private:
  std::size_t n_nodes_ = 0;
  std::size_t q_ = 0;
  std::vector<NodeId> in_;
};

enum class Rule {
  kOutOfRange,      // entry is not a valid node id
  kSelfLoop,        // node reads from itself
  kDuplicateEntry,  // same source appears twice in one in-list
  kOutDegree,       // node appears in != q distinct in-lists
};

std::string_view to_string(Rule rule);

struct Violation {
  NodeId node = 0;
  std::optional<std::size_t> slot;
  Rule rule = Rule::kOutOfRange;
  std::string detail;
};

// Empty iff every Topology invariant holds. A duplicated entry is reported
// once, at its later slot; out-degree counts distinct in-lists.
std::vector<Violation> validate(const Topology& topology);

// Moore neighborhood on a torus: node (r, c) reads the 8 cells at wrapped
// Chebyshev distance 1, slot order row-major over the offsets
// (-1,-1), (-1,0), (-1,1), (0,-1), (0,1), (1,-1), (1,0), (1,1).
// Throws InvalidSpec for non-periodic specs or rows/cols < 3.
Topology build_moore_lattice(const LatticeSpec& spec);

struct RewireEvent {
  std::size_t round = 0;
  NodeId initiator = 0;
  NodeId partner = 0;
  std::size_t initiator_slot = 0;
  std::size_t partner_slot = 0;
  bool accepted = false;

  bool operator==(const RewireEvent&) const = default;
};

// Exchanges in_list(i)[pos_i] with in_list(j)[pos_j]. Returns false and
// leaves the topology untouched when the exchange would create a self-loop or
// a duplicate entry, or when both entries are the same node (no-op).
// Throws PreconditionError for i == j or out-of-range ids/slots.
bool swap_in_entries(Topology& topology, NodeId i, std::size_t pos_i, NodeId j,
                     std::size_t pos_j);

// Maximum number of redraws after a rejected exchange in rewire_round.
inline constexpr int kRewireRedraws = 8;

// One neighbor-exchange pass: nodes are visited in ascending order; each
// draws a partner uniformly among the other nodes plus one slot on each side
// and attempts swap_in_entries, redrawing up to kRewireRedraws times after a
// rejection. Every attempt is appended to `log` when given. Returns the
// number of accepted exchanges.
std::size_t rewire_round(Topology& topology, Rng& rng, std::size_t round = 0,
                         std::vector<RewireEvent>* log = nullptr);

// Removes node v, redirecting each of its readers to one of its sources
// through a random bijection. Nodes above v shift down by one index.
// Requires node_count() > q + 1.
Topology delete_node(const Topology& topology, NodeId v, Rng& rng);

struct Insertion {
  Topology topology;
  NodeId node = 0;  // always the previous node_count()
};

// Adds a node u: q distinct sponsors each hand one of their in-entries to u
// and read from u in its place.
Insertion insert_node(const Topology& topology, Rng& rng);

}  // namespace evonet

#endif  // EVONET_TOPOLOGY_HPP
