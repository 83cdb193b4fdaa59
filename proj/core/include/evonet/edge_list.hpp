#ifndef EVONET_EDGE_LIST_HPP
#define EVONET_EDGE_LIST_HPP

#include <filesystem>
#include <iosfwd>

#include "evonet/topology.hpp"

namespace evonet {

// Snapshot format:
//
//   nodes=<N> q=<q>
//   <source>,<target>
//   ...
//
// Each target's in-edges are listed consecutively in slot order, targets in
// ascending order. Reading preserves slot order per target.
void write_edge_list(std::ostream& out, const Topology& topology);
Topology read_edge_list(std::istream& in);

void save_edge_list(const std::filesystem::path& path, const Topology& topology);
Topology load_edge_list(const std::filesystem::path& path);

}  // namespace evonet

#endif  // EVONET_EDGE_LIST_HPP
