#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "olsb/rng.hpp"
#include "olsb/spanner.hpp"

using namespace olsb;

namespace {

// Paths over a 3-node chain 0->1->2: link 0 alone, link 1 alone, both.
struct Fixture {
  Graph g{3, {{node_id(0), node_id(1)}, {node_id(1), node_id(2)}}};
  Path a = make_path(g, 0, {link_id(0)});
  Path b = make_path(g, 1, {link_id(1)});
  Path ab = make_path(g, 2, {link_id(0), link_id(1)});
};

void check_coefficients(const std::vector<Path>& paths, const SpannerSet& s) {
  for (const auto& p : paths) {
    const auto c = express_in_spanner(p, s);
    CHECK(c.cwiseAbs().maxCoeff() <= s.coefficient_bound + 1e-6);
  }
}

}  // namespace

TEST_CASE("two unit vectors span their sum") {
  Fixture f;
  const auto s = build_spanner({f.a, f.b, f.ab}, 1.0);
  REQUIRE(s.base_paths.size() == 2);
  CHECK(s.coefficient_bound == 1.0);
  check_coefficients({f.a, f.b, f.ab}, s);
  // [1,1] expressed against {[1,0],[0,1]}
  const auto s2 = build_spanner({f.a, f.b}, 1.0);
  const auto c = express_in_spanner(f.ab, s2);
  CHECK(c(0) == doctest::Approx(1.0));
  CHECK(c(1) == doctest::Approx(1.0));
}

TEST_CASE("degenerate families") {
  Fixture f;
  const auto one = build_spanner({f.ab}, 2.0);
  REQUIRE(one.base_paths.size() == 1);
  CHECK(one.base_paths[0].id == 2);
  Path twin = f.ab;
  twin.id = 9;
  CHECK(build_spanner({f.ab, twin}, 2.0).base_paths.size() == 1);
  CHECK_THROWS_AS(build_spanner({}, 2.0), SpanError);
  CHECK_THROWS_AS(build_spanner({f.a}, 0.5), SpanError);
}

TEST_CASE("base path expresses as a unit vector") {
  Fixture f;
  const auto s = build_spanner({f.a, f.b, f.ab}, 1.0);
  for (std::size_t i = 0; i < s.base_paths.size(); ++i) {
    const auto c = express_in_spanner(s.base_paths[i], s);
    for (Eigen::Index k = 0; k < c.size(); ++k) CHECK(c(k) == doctest::Approx(k == static_cast<Eigen::Index>(i) ? 1.0 : 0.0));
  }
}

TEST_CASE("outside the span") {
  Fixture f;
  const auto s = build_spanner({f.a}, 1.0);
  CHECK_THROWS_AS(express_in_spanner(f.b, s), SpanError);
}

TEST_CASE("coefficient bound on grid path families") {
  for (int rows : {3, 4}) {
    for (auto orient : {GridOrientation::kForward, GridOrientation::kBidirectional}) {
      const Graph g = build_grid_network(rows, 4, {{{1, 1}, {2, 2}}}, orient);
      const NodeId src = g.node_at({1, 1});
      const NodeId dst = g.node_at({rows, 4});
      const auto paths = enumerate_paths(g, src, dst, orient == GridOrientation::kForward ? 20 : 7, 200);
      REQUIRE(!paths.empty());
      for (double C : {1.0, 2.0}) {
        SpannerOptions o;
        o.approx_C = C;
        const auto s = build_spanner(paths, o);
        CHECK(s.base_paths.size() <= std::min(paths.size(), g.link_count()));
        CHECK(std::is_sorted(s.base_paths.begin(), s.base_paths.end(),
                             [](const Path& x, const Path& y) { return x.id < y.id; }));
        check_coefficients(paths, s);
      }
    }
  }
}

TEST_CASE("permuting the input keeps the Gram determinant") {
  const Graph g = build_grid_network(3, 3, {}, GridOrientation::kForward);
  auto paths = enumerate_paths(g, g.node_at({1, 1}), g.node_at({3, 3}), 10);
  REQUIRE(paths.size() == 6);
  const double det = gram_determinant(build_spanner(paths, 1.0).base_paths);
  CHECK(det > 0);
  CounterStream rng(5, RngDomain::kTest, 0, 0);
  for (int round = 0; round < 10; ++round) {
    for (std::size_t i = paths.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
      std::swap(paths[i - 1], paths[j]);
    }
    CHECK(gram_determinant(build_spanner(paths, 1.0).base_paths) == doctest::Approx(det));
  }
}

TEST_CASE("large families fall back to the approximate swap") {
  const Graph g = build_grid_network(5, 5, {}, GridOrientation::kForward);
  const auto paths = enumerate_paths(g, g.node_at({1, 1}), g.node_at({5, 5}), 20);
  REQUIRE(paths.size() == 70);
  SpannerOptions o;
  o.approx_C = 2.0;
  const auto s = build_spanner(paths, o);
  CHECK_FALSE(s.exact);
  CHECK(s.coefficient_bound == 2.0);
  check_coefficients(paths, s);
}
