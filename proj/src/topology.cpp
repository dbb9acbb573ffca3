#include "olsb/topology.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>

#include <deque>

#include "json.hpp"

namespace olsb {

std::string to_string(Coord c) {
  return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

Graph::Graph(std::size_t n_nodes, const std::vector<std::pair<NodeId, NodeId>>& links)
    : n_nodes_(n_nodes), out_(n_nodes) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> seen;
  seen.reserve(links.size());
  for (const auto& [s, d] : links) {
    if (index_of(s) >= n_nodes || index_of(d) >= n_nodes) {
      throw ConfigError("link endpoint out of range: " + std::to_string(index_of(s)) + "->" +
                        std::to_string(index_of(d)));
    }
    if (s == d) {
      throw ConfigError("self-loop at node " + std::to_string(index_of(s)));
    }
    seen.emplace_back(index_of(s), index_of(d));
  }
  auto sorted = seen;
  std::sort(sorted.begin(), sorted.end());
  if (auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end()) {
    throw ConfigError("duplicate directed link " + std::to_string(dup->first) + "->" +
                      std::to_string(dup->second));
  }

  links_.reserve(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    links_.push_back({link_id(i), links[i].first, links[i].second});
    out_[index_of(links[i].first)].push_back(link_id(i));
  }
  for (auto& adj : out_) {
    std::sort(adj.begin(), adj.end(), [&](LinkId a, LinkId b) {
      return index_of(links_[index_of(a)].dst) < index_of(links_[index_of(b)].dst);
    });
  }
}

std::optional<LinkId> Graph::find_link(NodeId src, NodeId dst) const {
  for (LinkId e : out_links(src)) {
    if (links_[index_of(e)].dst == dst) return e;
  }
  return std::nullopt;
}

void Graph::set_coords(std::vector<Coord> coords) {
  if (coords.size() != n_nodes_) {
    throw ConfigError("coordinate labels: expected " + std::to_string(n_nodes_) + ", got " +
                      std::to_string(coords.size()));
  }
  coord_index_.clear();
  for (std::size_t i = 0; i < coords.size(); ++i) coord_index_.emplace_back(coords[i], node_id(i));
  std::sort(coord_index_.begin(), coord_index_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < coord_index_.size(); ++i) {
    if (coord_index_[i].first == coord_index_[i - 1].first) {
      throw ConfigError("duplicate node coordinate " + to_string(coord_index_[i].first));
    }
  }
  coords_ = std::move(coords);
}

NodeId Graph::node_at(Coord c) const {
  auto it = std::lower_bound(coord_index_.begin(), coord_index_.end(), c,
                             [](const auto& entry, Coord key) { return entry.first < key; });
  if (it == coord_index_.end() || it->first != c) {
    throw ConfigError("unknown node coordinate " + to_string(c));
  }
  return it->second;
}

std::vector<bool> Graph::reachable_to(NodeId d) const {
  std::vector<std::vector<std::uint32_t>> in(n_nodes_);
  for (const Link& l : links_) in[index_of(l.dst)].push_back(index_of(l.src));
  std::vector<bool> seen(n_nodes_, false);
  std::vector<std::uint32_t> stack{index_of(d)};
  seen[index_of(d)] = true;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto u : in[v]) {
      if (!seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
    }
  }
  return seen;
}

std::vector<int> Graph::hop_distances_to(NodeId d) const {
  std::vector<std::vector<std::uint32_t>> in(n_nodes_);
  for (const Link& l : links_) in[index_of(l.dst)].push_back(index_of(l.src));
  std::vector<int> dist(n_nodes_, -1);
  std::deque<std::uint32_t> queue{static_cast<std::uint32_t>(index_of(d))};
  dist[index_of(d)] = 0;
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto u : in[v]) {
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

std::vector<NodeId> path_nodes(const Path& p, const Graph& g) {
  std::vector<NodeId> nodes{p.src};
  nodes.reserve(p.links.size() + 1);
  for (LinkId e : p.links) nodes.push_back(g.link(e).dst);
  return nodes;
}

Path make_path(const Graph& g, std::uint32_t id, std::vector<LinkId> links) {
  if (links.empty()) throw ConfigError("empty path");
  Path p;
  p.id = id;
  p.src = g.link(links.front()).src;
  p.dst = g.link(links.back()).dst;
  p.incidence.assign(g.link_count(), 0);
  std::vector<bool> visited(g.node_count(), false);
  visited[index_of(p.src)] = true;
  NodeId at = p.src;
  for (LinkId e : links) {
    const Link& l = g.link(e);
    if (l.src != at) throw ConfigError("path links are not contiguous");
    if (visited[index_of(l.dst)]) throw ConfigError("path revisits a node");
    visited[index_of(l.dst)] = true;
    p.incidence[index_of(e)] = 1;
    at = l.dst;
  }
  p.links = std::move(links);
  return p;
}

Graph build_grid_network(int rows, int cols, const std::vector<ExtraLink>& extra_links,
                         GridOrientation orientation) {
  if (rows < 1 || cols < 1) throw ConfigError("grid needs rows >= 1 and cols >= 1");
  const auto at = [cols](int r, int c) { return node_id(static_cast<std::size_t>((r - 1) * cols + (c - 1))); };

  std::vector<std::pair<NodeId, NodeId>> links;
  for (int r = 1; r <= rows; ++r) {
    for (int c = 1; c <= cols; ++c) {
      if (c < cols) {
        links.emplace_back(at(r, c), at(r, c + 1));
        if (orientation == GridOrientation::kBidirectional) links.emplace_back(at(r, c + 1), at(r, c));
      }
      if (r < rows) {
        links.emplace_back(at(r, c), at(r + 1, c));
        if (orientation == GridOrientation::kBidirectional) links.emplace_back(at(r + 1, c), at(r, c));
      }
    }
  }
  const auto valid = [&](Coord c) { return c.row >= 1 && c.row <= rows && c.col >= 1 && c.col <= cols; };
  for (std::size_t i = 0; i < extra_links.size(); ++i) {
    const auto& x = extra_links[i];
    if (!valid(x.from) || !valid(x.to)) {
      throw ConfigError("extra link " + std::to_string(i) + ": coordinate outside " +
                        std::to_string(rows) + "x" + std::to_string(cols) + " grid: " +
                        to_string(x.from) + "->" + to_string(x.to));
    }
    links.emplace_back(at(x.from.row, x.from.col), at(x.to.row, x.to.col));
  }

  Graph g(static_cast<std::size_t>(rows * cols), links);
  std::vector<Coord> coords;
  coords.reserve(static_cast<std::size_t>(rows * cols));
  for (int r = 1; r <= rows; ++r)
    for (int c = 1; c <= cols; ++c) coords.push_back({r, c});
  g.set_coords(std::move(coords));
  return g;
}

std::vector<Path> enumerate_paths(const Graph& g, NodeId src, NodeId dst, std::size_t max_hops,
                                  std::size_t max_paths) {
  if (src == dst) throw ConfigError("enumerate_paths: src == dst");
  if (max_hops < 1) throw ConfigError("enumerate_paths: max_hops must be >= 1");

  const auto dist = g.hop_distances_to(dst);
  std::vector<std::vector<LinkId>> found;
  std::vector<LinkId> stack;
  std::vector<bool> on_path(g.node_count(), false);

  // Iterative DFS keeps deep graphs off the call stack.
  struct Frame {
    NodeId node;
    std::size_t next = 0;
  };
  std::vector<Frame> frames{{src, 0}};
  on_path[index_of(src)] = true;
  while (!frames.empty()) {
    Frame& f = frames.back();
    const auto& adj = g.out_links(f.node);
    if (f.next == adj.size() || stack.size() == max_hops) {
      on_path[index_of(f.node)] = false;
      frames.pop_back();
      if (!stack.empty()) stack.pop_back();
      continue;
    }
    const LinkId e = adj[f.next++];
    const NodeId w = g.link(e).dst;
    // too far from dst to finish within the hop limit
    if (on_path[index_of(w)] || dist[index_of(w)] < 0 ||
        stack.size() + 1 + static_cast<std::size_t>(dist[index_of(w)]) > max_hops) {
      continue;
    }
    if (w == dst) {
      stack.push_back(e);
      found.push_back(stack);
      stack.pop_back();
      continue;
    }
    stack.push_back(e);
    on_path[index_of(w)] = true;
    frames.push_back({w, 0});
  }

  if (max_paths != 0 && found.size() > max_paths) {
    std::vector<std::size_t> order(found.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return found[a].size() < found[b].size(); });
    order.resize(max_paths);
    std::sort(order.begin(), order.end());
    std::vector<std::vector<LinkId>> kept;
    kept.reserve(max_paths);
    for (auto i : order) kept.push_back(std::move(found[i]));
    found = std::move(kept);
  }

  std::vector<Path> paths;
  paths.reserve(found.size());
  for (std::size_t i = 0; i < found.size(); ++i) {
    paths.push_back(make_path(g, static_cast<std::uint32_t>(i), std::move(found[i])));
  }
  return paths;
}

Eigen::MatrixXd path_incidence_matrix(const std::vector<Path>& paths, const Graph& g) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(paths.size()),
                                            static_cast<Eigen::Index>(g.link_count()));
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (LinkId e : paths[i].links) m(static_cast<Eigen::Index>(i), index_of(e)) = 1.0;
  }
  return m;
}

// ---------------------------------------------------------------------------

namespace {

// Line number (1-based) where each element of the top-level array `key`
// starts. Small scanner aware of strings and nesting; the JSON has already
// been validated by the real parser when this runs.
std::vector<int> array_element_lines(std::string_view text, std::string_view key) {
  std::vector<int> lines;
  const std::string needle = "\"" + std::string(key) + "\"";
  int depth = 0;
  int line = 1;
  bool in_string = false;
  std::size_t i = 0;
  std::size_t array_open = std::string_view::npos;
  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '\n') ++line;
    if (in_string) {
      if (ch == '\\') {
        ++i;
      } else if (ch == '"') {
        in_string = false;
      }
      continue;
    }
    if (ch == '"') {
      if (depth == 1 && text.substr(i, needle.size()) == needle) {
        std::size_t j = text.find('[', i + needle.size());
        if (j == std::string_view::npos) return lines;
        for (std::size_t k = i; k < j; ++k)
          if (text[k] == '\n') ++line;
        array_open = j;
        i = j;
        break;
      }
      in_string = true;
      continue;
    }
    if (ch == '{' || ch == '[') ++depth;
    if (ch == '}' || ch == ']') --depth;
  }
  if (array_open == std::string_view::npos) return lines;

  depth = 0;
  bool expect_element = true;
  for (i = array_open + 1; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '\n') {
      ++line;
      continue;
    }
    if (in_string) {
      if (ch == '\\') {
        ++i;
      } else if (ch == '"') {
        in_string = false;
      }
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    if (depth == 0 && ch == ']') break;
    if (depth == 0 && ch == ',') {
      expect_element = true;
      continue;
    }
    if (depth == 0 && expect_element) {
      lines.push_back(line);
      expect_element = false;
    }
    if (ch == '"') in_string = true;
    if (ch == '{' || ch == '[') ++depth;
    if (ch == '}' || ch == ']') --depth;
  }
  return lines;
}

Coord parse_coord(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw ConfigError(where + ": expected [row, col]");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

TopologyFile parse_topology(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("topology: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("topology: top level must be an object");
  if (!doc.contains("nodes") || !doc["nodes"].is_array())
    throw ConfigError("topology: missing array 'nodes'");
  if (!doc.contains("links") || !doc["links"].is_array())
    throw ConfigError("topology: missing array 'links'");

  const auto node_lines = array_element_lines(text, "nodes");
  const auto link_lines = array_element_lines(text, "links");
  const auto line_of = [](const std::vector<int>& lines, std::size_t i) {
    return i < lines.size() ? " (line " + std::to_string(lines[i]) + ")" : std::string{};
  };

  std::vector<Coord> coords;
  for (std::size_t i = 0; i < doc["nodes"].size(); ++i) {
    coords.push_back(parse_coord(doc["nodes"][i], "nodes[" + std::to_string(i) + "]" + line_of(node_lines, i)));
  }
  Graph labels(coords.size(), {});
  try {
    labels.set_coords(coords);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("topology: ") + e.what());
  }

  std::vector<std::pair<NodeId, NodeId>> links;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> keys;
  for (std::size_t i = 0; i < doc["links"].size(); ++i) {
    const auto& l = doc["links"][i];
    const std::string where = "links[" + std::to_string(i) + "]" + line_of(link_lines, i);
    if (!l.is_object() || !l.contains("src") || !l.contains("dst"))
      throw ConfigError("topology: " + where + ": expected {\"src\": [r,c], \"dst\": [r,c]}");
    NodeId s, d;
    try {
      s = labels.node_at(parse_coord(l["src"], where + ".src"));
      d = labels.node_at(parse_coord(l["dst"], where + ".dst"));
    } catch (const ConfigError& e) {
      throw ConfigError("topology: " + where + ": " + e.what());
    }
    if (s == d) throw ConfigError("topology: " + where + ": self-loop at " + to_string(coords[index_of(s)]));
    for (std::size_t k = 0; k < links.size(); ++k) {
      if (links[k] == std::pair{s, d}) {
        throw ConfigError("topology: " + where + ": duplicate of links[" + std::to_string(k) + "]" +
                          line_of(link_lines, k));
      }
    }
    links.emplace_back(s, d);
  }

  TopologyFile out{Graph(coords.size(), links), doc.value("note", std::string{})};
  out.graph.set_coords(std::move(coords));
  return out;
}

TopologyFile load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open topology file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_topology(ss.str());
}

std::string dump_topology(const Graph& g, std::string_view note) {
  // One entry per line keeps the loader's line diagnostics meaningful.
  std::ostringstream os;
  os << "{\n  \"schema\": 1,\n  \"note\": " << nlohmann::json(std::string(note)).dump() << ",\n";
  os << "  \"nodes\": [\n";
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    const Coord c = g.coord_of(node_id(v));
    os << "    [" << c.row << ", " << c.col << "]" << (v + 1 < g.node_count() ? "," : "") << "\n";
  }
  os << "  ],\n  \"links\": [\n";
  for (std::size_t e = 0; e < g.link_count(); ++e) {
    const Link& l = g.links()[e];
    const Coord s = g.coord_of(l.src), d = g.coord_of(l.dst);
    os << "    {\"src\": [" << s.row << ", " << s.col << "], \"dst\": [" << d.row << ", " << d.col << "]}"
       << (e + 1 < g.link_count() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

}  // namespace olsb
