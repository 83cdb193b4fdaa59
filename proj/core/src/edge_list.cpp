#include "evonet/edge_list.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <string>

#include "evonet/error.hpp"

namespace evonet {
namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw IoError("edge list line " + std::to_string(line) + ": " + what);
}

std::uint64_t parse_uint(std::string_view text, std::size_t line) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(line, "expected an unsigned integer, got '" + std::string(text) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

}  // namespace

void write_edge_list(std::ostream& out, const Topology& topology) {
  out << "nodes=" << topology.node_count() << " q=" << topology.degree() << '\n';
  for (NodeId target = 0; target < topology.node_count(); ++target) {
    for (NodeId source : topology.in_list(target)) {
      out << source << ',' << target << '\n';
    }
  }
}

Topology read_edge_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(1, "missing header");
  std::string_view header = trim(line);
  if (!header.starts_with("nodes=")) fail(1, "header must start with nodes=");
  const auto space = header.find(" q=");
  if (space == std::string_view::npos) fail(1, "header must contain q=");
  const std::uint64_t n = parse_uint(header.substr(6, space - 6), 1);
  const std::uint64_t q = parse_uint(header.substr(space + 3), 1);
  if (n >= std::numeric_limits<NodeId>::max()) fail(1, "too many nodes");

  std::vector<std::vector<NodeId>> lists(n);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = trim(line);
    if (text.empty()) continue;
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) fail(line_no, "expected source,target");
    const std::uint64_t source = parse_uint(trim(text.substr(0, comma)), line_no);
    const std::uint64_t target = parse_uint(trim(text.substr(comma + 1)), line_no);
    if (source >= n || target >= n) fail(line_no, "node id out of range");
    if (lists[target].size() == q) {
      fail(line_no, "node " + std::to_string(target) + " has more than q in-edges");
    }
    lists[target].push_back(static_cast<NodeId>(source));
  }

  std::vector<NodeId> flat;
  flat.reserve(n * q);
  for (std::size_t i = 0; i < n; ++i) {
    if (lists[i].size() != q) {
      throw IoError("edge list: node " + std::to_string(i) + " has " +
                    std::to_string(lists[i].size()) + " in-edges, expected " +
                    std::to_string(q));
    }
    flat.insert(flat.end(), lists[i].begin(), lists[i].end());
  }
  return Topology(n, q, std::move(flat));
}

void save_edge_list(const std::filesystem::path& path, const Topology& topology) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_edge_list(out, topology);
  if (!out) throw IoError("write failed: " + path.string());
}

Topology load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return read_edge_list(in);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace evonet
