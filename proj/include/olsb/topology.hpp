#pragma once

#include <cstddef>
#include <cstdint>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace olsb {

enum class NodeId : std::uint32_t {};
enum class LinkId : std::uint32_t {};

constexpr std::uint32_t index_of(NodeId v) { return static_cast<std::uint32_t>(v); }
constexpr std::uint32_t index_of(LinkId e) { return static_cast<std::uint32_t>(e); }
constexpr NodeId node_id(std::size_t i) { return static_cast<NodeId>(i); }
constexpr LinkId link_id(std::size_t i) { return static_cast<LinkId>(i); }

/// Raised for malformed topology, flow or experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 1-based (row, col) grid coordinate, as used in the flow tables.
struct Coord {
  int row = 0;
  int col = 0;
  auto operator<=>(const Coord&) const = default;
};

std::string to_string(Coord c);

struct Link {
  LinkId id{};
  NodeId src{};
  NodeId dst{};
};

/// Directed graph with dense node and link indices.
///
/// Immutable once built. Outgoing adjacency lists are sorted by destination
/// node so that every traversal order derived from them is deterministic.
class Graph {
 public:
  Graph() = default;
  /// Throws ConfigError on self-loops, duplicate directed edges or
  /// out-of-range endpoints.
  Graph(std::size_t n_nodes, const std::vector<std::pair<NodeId, NodeId>>& links);

  std::size_t node_count() const { return n_nodes_; }
  std::size_t link_count() const { return links_.size(); }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkId e) const { return links_.at(index_of(e)); }
  const std::vector<LinkId>& out_links(NodeId v) const { return out_.at(index_of(v)); }
  std::optional<LinkId> find_link(NodeId src, NodeId dst) const;

  /// Coordinate labels, one per node, unique. Configs name nodes by label.
  void set_coords(std::vector<Coord> coords);
  bool has_coords() const { return !coords_.empty(); }
  /// Throws ConfigError for an unknown coordinate.
  NodeId node_at(Coord c) const;
  Coord coord_of(NodeId v) const { return coords_.at(index_of(v)); }

  /// reachable_to(d)[v] is true when some directed path leads from v to d.
  std::vector<bool> reachable_to(NodeId d) const;
  /// Fewest links from each node to d; -1 where d is unreachable.
  std::vector<int> hop_distances_to(NodeId d) const;

 private:
  std::size_t n_nodes_ = 0;
  std::vector<Link> links_;
  std::vector<std::vector<LinkId>> out_;
  std::vector<Coord> coords_;
  std::vector<std::pair<Coord, NodeId>> coord_index_;  // sorted by coord
};

/// Loop-free directed path.
struct Path {
  std::uint32_t id = 0;
  std::vector<LinkId> links;
  NodeId src{};
  NodeId dst{};
  /// incidence[e] == 1 iff link e lies on the path; length |E|.
  std::vector<std::uint8_t> incidence;

  std::size_t hops() const { return links.size(); }
};

/// Node sequence src, v1, ..., dst of a path.
std::vector<NodeId> path_nodes(const Path& p, const Graph& g);

/// Builds a Path over an explicit link sequence, checking contiguity and
/// loop-freedom. Throws ConfigError on a malformed sequence.
Path make_path(const Graph& g, std::uint32_t id, std::vector<LinkId> links);

enum class GridOrientation {
  kBidirectional,  ///< both directions of every nearest-neighbour pair
  kForward,        ///< only (r,c)->(r,c+1) and (r,c)->(r+1,c)
};

struct ExtraLink {
  Coord from;
  Coord to;
};

/// rows x cols grid plus extra directed links given by coordinates.
Graph build_grid_network(int rows, int cols, const std::vector<ExtraLink>& extra_links,
                         GridOrientation orientation = GridOrientation::kBidirectional);

/// All loop-free src->dst paths with at most max_hops links, in
/// lexicographic DFS order over the sorted adjacency lists. When max_paths is
/// nonzero and exceeded, the shortest-hop paths are kept (ties in DFS order).
/// Path ids are assigned 0.. in output order.
std::vector<Path> enumerate_paths(const Graph& g, NodeId src, NodeId dst, std::size_t max_hops,
                                  std::size_t max_paths = 0);

/// Row i is paths[i].incidence.
Eigen::MatrixXd path_incidence_matrix(const std::vector<Path>& paths, const Graph& g);

// ---------------------------------------------------------------------------
// Topology file (JSON)

struct TopologyFile {
  Graph graph;
  std::string note;
};

/// Parses the topology JSON text. Diagnostics for bad links name the
/// offending line of the input.
TopologyFile parse_topology(std::string_view text);
TopologyFile load_topology(const std::string& path);
std::string dump_topology(const Graph& g, std::string_view note);

}  // namespace olsb
