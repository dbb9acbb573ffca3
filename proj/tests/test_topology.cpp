#include <doctest.h>

#include <algorithm>
#include <set>

#include "olsb/rng.hpp"
#include "olsb/topology.hpp"

using namespace olsb;

namespace {

// s=0, a=1, d=2 with s->a, a->d, s->d
Graph triangle() { return Graph(3, {{node_id(0), node_id(1)}, {node_id(1), node_id(2)}, {node_id(0), node_id(2)}}); }

std::vector<std::size_t> node_seq(const Path& p, const Graph& g) {
  std::vector<std::size_t> out;
  for (NodeId v : path_nodes(p, g)) out.push_back(index_of(v));
  return out;
}

}  // namespace

TEST_CASE("grid construction") {
  SUBCASE("1x2") {
    const Graph g = build_grid_network(1, 2, {});
    CHECK(g.node_count() == 2);
    CHECK(g.link_count() == 2);
  }
  SUBCASE("2x2") {
    const Graph g = build_grid_network(2, 2, {});
    CHECK(g.node_count() == 4);
    CHECK(g.link_count() == 8);
  }
  SUBCASE("forward orientation keeps one direction") {
    CHECK(build_grid_network(2, 2, {}, GridOrientation::kForward).link_count() == 4);
    CHECK(build_grid_network(8, 8, {}, GridOrientation::kForward).link_count() == 112);
  }
  SUBCASE("extra links") {
    const Graph g = build_grid_network(3, 3, {{{1, 1}, {2, 2}}});
    CHECK(g.link_count() == 25);
    CHECK(g.find_link(g.node_at({1, 1}), g.node_at({2, 2})).has_value());
  }
  SUBCASE("bad extra coordinate") {
    CHECK_THROWS_AS(build_grid_network(2, 2, {{{1, 1}, {3, 3}}}), ConfigError);
    CHECK_THROWS_AS(build_grid_network(0, 2, {}), ConfigError);
  }
}

TEST_CASE("canonical topology file") {
  const auto t = load_topology(std::string(OLSB_DATA_DIR) + "/topology_8x8.json");
  CHECK(t.graph.node_count() == 64);
  CHECK(t.graph.link_count() == 119);
  CHECK(t.graph.has_coords());
  // first flow's endpoints exist
  CHECK_NOTHROW(t.graph.node_at({1, 2}));
  CHECK_NOTHROW(t.graph.node_at({4, 4}));
  // round trip through the canonical dump
  const auto again = parse_topology(dump_topology(t.graph, t.note));
  CHECK(again.graph.link_count() == 119);
  CHECK(dump_topology(again.graph, again.note) == dump_topology(t.graph, t.note));
}

TEST_CASE("topology loader diagnostics") {
  const std::string dup = R"({
  "schema": 1,
  "nodes": [[1, 1], [1, 2]],
  "links": [
    {"src": [1, 1], "dst": [1, 2]},
    {"src": [1, 1], "dst": [1, 2]}
  ]
})";
  CHECK_THROWS_WITH_AS(parse_topology(dup), doctest::Contains("line"), ConfigError);
  const std::string loop = R"({
  "schema": 1,
  "nodes": [[1, 1], [1, 2]],
  "links": [
    {"src": [1, 2], "dst": [1, 2]}
  ]
})";
  CHECK_THROWS_WITH_AS(parse_topology(loop), doctest::Contains("line 5"), ConfigError);
  CHECK_THROWS_AS(parse_topology("{"), ConfigError);
}

TEST_CASE("graph invariants") {
  CHECK_THROWS_AS(Graph(2, {{node_id(0), node_id(0)}}), ConfigError);
  CHECK_THROWS_AS(Graph(2, {{node_id(0), node_id(1)}, {node_id(0), node_id(1)}}), ConfigError);
  CHECK_THROWS_AS(Graph(2, {{node_id(0), node_id(5)}}), ConfigError);
  const Graph g = triangle();
  const auto dist = g.hop_distances_to(node_id(2));
  CHECK(dist == std::vector<int>{1, 1, 0});
  CHECK(g.hop_distances_to(node_id(0)) == std::vector<int>{0, -1, -1});
}

TEST_CASE("path enumeration examples") {
  SUBCASE("single link") {
    const Graph g(2, {{node_id(0), node_id(1)}});
    const auto ps = enumerate_paths(g, node_id(0), node_id(1), 1);
    REQUIRE(ps.size() == 1);
    CHECK(node_seq(ps[0], g) == std::vector<std::size_t>{0, 1});
  }
  SUBCASE("triangle") {
    const Graph g = triangle();
    const auto two = enumerate_paths(g, node_id(0), node_id(2), 2);
    REQUIRE(two.size() == 2);
    std::set<std::vector<std::size_t>> seqs;
    for (const auto& p : two) seqs.insert(node_seq(p, g));
    CHECK(seqs == std::set<std::vector<std::size_t>>{{0, 2}, {0, 1, 2}});
    const auto one = enumerate_paths(g, node_id(0), node_id(2), 1);
    REQUIRE(one.size() == 1);
    CHECK(node_seq(one[0], g) == std::vector<std::size_t>{0, 2});
  }
  SUBCASE("unreachable gives empty") {
    const Graph g = triangle();
    CHECK(enumerate_paths(g, node_id(2), node_id(0), 2).empty());
  }
  SUBCASE("max_paths keeps the shortest") {
    const Graph g = triangle();
    const auto ps = enumerate_paths(g, node_id(0), node_id(2), 2, 1);
    REQUIRE(ps.size() == 1);
    CHECK(ps[0].hops() == 1);
  }
}

TEST_CASE("enumerated paths are loop-free, bounded, distinct and deterministic") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CounterStream rng(seed, RngDomain::kTest, 0, 0);
    const std::size_t n = 7;
    std::vector<std::pair<NodeId, NodeId>> links;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a != b && rng.uniform() < 0.35) links.emplace_back(node_id(a), node_id(b));
      }
    }
    const Graph g(n, links);
    for (std::size_t hops : {2u, 4u, 6u}) {
      const auto ps = enumerate_paths(g, node_id(0), node_id(n - 1), hops);
      const auto again = enumerate_paths(g, node_id(0), node_id(n - 1), hops);
      REQUIRE(ps.size() == again.size());
      std::set<std::vector<LinkId>> seen;
      for (std::size_t i = 0; i < ps.size(); ++i) {
        CHECK(ps[i].links == again[i].links);
        CHECK(ps[i].hops() <= hops);
        const auto nodes = node_seq(ps[i], g);
        CHECK(nodes.front() == 0);
        CHECK(nodes.back() == n - 1);
        CHECK(std::set<std::size_t>(nodes.begin(), nodes.end()).size() == nodes.size());
        CHECK(seen.insert(ps[i].links).second);
        int ones = 0;
        for (auto b : ps[i].incidence) ones += b;
        CHECK(ones == static_cast<int>(ps[i].hops()));
      }
    }
  }
}

TEST_CASE("incidence matrix") {
  const Graph g = triangle();  // links: 0 s->a, 1 a->d, 2 s->d
  SUBCASE("row equals incidence") {
    const Path p = make_path(g, 0, {link_id(0), link_id(1)});
    const auto m = path_incidence_matrix({p}, g);
    REQUIRE(m.rows() == 1);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(0, 1) == 1.0);
    CHECK(m(0, 2) == 0.0);
  }
  SUBCASE("links {0,2} in a 3-link graph") {
    const Graph h(4, {{node_id(0), node_id(1)}, {node_id(2), node_id(3)}, {node_id(1), node_id(2)}});
    const auto m = path_incidence_matrix({make_path(h, 0, {link_id(0), link_id(2)})}, h);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(0, 1) == 0.0);
    CHECK(m(0, 2) == 1.0);
  }
  SUBCASE("empty list") {
    const auto m = path_incidence_matrix({}, g);
    CHECK(m.rows() == 0);
    CHECK(m.cols() == 3);
  }
  SUBCASE("disjoint single-link paths") {
    const auto m = path_incidence_matrix({make_path(g, 0, {link_id(0)}), make_path(g, 1, {link_id(2)})}, g);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(1, 2) == 1.0);
    CHECK(m.sum() == 2.0);
  }
  SUBCASE("malformed sequences") {
    CHECK_THROWS_AS(make_path(g, 0, {link_id(1), link_id(0)}), ConfigError);
    CHECK_THROWS_AS(make_path(g, 0, {}), ConfigError);
  }
}
