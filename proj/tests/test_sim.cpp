#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "olsb/analytics.hpp"
#include "olsb/config.hpp"
#include "olsb/sim.hpp"

using namespace olsb;

namespace {

SimConfig two_node(double rate, double w = 0.6) {
  SimConfig c;
  c.graph = std::make_shared<Graph>(2, std::vector<std::pair<NodeId, NodeId>>{{node_id(0), node_id(1)}});
  c.flows = {{0, node_id(0), node_id(1), rate}};
  c.link_dists = {WeightDistribution::constant(w)};
  c.levels = CostLevels::uniform(4);
  c.horizon = 1000;
  c.cap = 1;
  c.link_cap = 1;
  return c;
}

// 0 -> 2 directly (mean 0.6) or through 1 (0.9 + 0.9); normalised 0.2 vs 0.6.
SimConfig triangle(Algorithm alg, double rate) {
  SimConfig c;
  c.graph = std::make_shared<Graph>(3, std::vector<std::pair<NodeId, NodeId>>{
                                           {node_id(0), node_id(2)}, {node_id(0), node_id(1)}, {node_id(1), node_id(2)}});
  c.flows = {{0, node_id(0), node_id(2), rate}};
  c.link_dists = {WeightDistribution::uniform(0.5, 0.7), WeightDistribution::uniform(0.85, 0.95),
                  WeightDistribution::uniform(0.85, 0.95)};
  c.levels = CostLevels::uniform(8);
  c.algorithm = alg;
  c.horizon = 10000;
  c.cap = 2;
  c.link_cap = 2;
  return c;
}

SimConfig grid(Algorithm alg, std::int64_t slots, std::uint64_t seed = 1) {
  SimConfig c;
  auto g = std::make_shared<Graph>(build_grid_network(4, 4, {}, GridOrientation::kForward));
  c.graph = g;
  c.flows = {{0, g->node_at({1, 1}), g->node_at({4, 4}), 0.4}, {1, g->node_at({1, 4}), g->node_at({4, 1}), 0.0},
             {2, g->node_at({2, 1}), g->node_at({4, 3}), 0.3}};
  c.flows.erase(c.flows.begin() + 1);  // (1,4) cannot reach (4,1) in the forward grid
  c.flows[1].id = 1;
  c.link_dists = heterogeneous_uniform(g->link_count(), 3, 0.0, 1.0, 0.05);
  c.levels = CostLevels::uniform(16);
  c.algorithm = alg;
  c.horizon = slots;
  c.seed = seed;
  c.cap = 3;
  c.link_cap = 3;
  c.stride = 50;
  return c;
}

}  // namespace

TEST_CASE("empty horizon yields an empty artifact") {
  auto c = two_node(1.0);
  c.horizon = 0;
  const auto art = run(c);
  CHECK(art.rows.empty());
  CHECK(art.regret_cum.empty());
  CHECK(art.injected == 0);
}

TEST_CASE("no arrivals means no regret and no traffic") {
  auto c = two_node(0.0);
  const auto art = run(c);
  CHECK(art.injected == 0);
  CHECK(art.delivered == 0);
  CHECK(art.regret_cum.back() == 0.0);
  CHECK_FALSE(summarize(art).avg_delay_us.has_value());
}

TEST_CASE("Poisson arrivals have the configured mean") {
  const FlowSpec f{0, node_id(0), node_id(1), 1.5};
  double sum = 0.0;
  const int n = 100000;
  for (int t = 1; t <= n; ++t) sum += arrivals(f, t, 11);
  CHECK(sum / n == doctest::Approx(1.5).epsilon(0.01));
  CHECK(arrivals(f, 17, 11) == arrivals(f, 17, 11));
}

TEST_CASE("one-hop packets leave in the slot after injection") {
  auto c = two_node(0.3);
  c.cap = 5;
  c.link_cap = 5;
  const auto art = run(c);
  REQUIRE(art.delivered > 0);
  const auto s = summarize(art);
  CHECK(*s.avg_delay_us == doctest::Approx(kSlotMicroseconds));
  CHECK(*s.avg_cost == doctest::Approx(0.3));
}

TEST_CASE("runs are deterministic in the config") {
  const auto a = run(grid(Algorithm::kOlsb, 2000, 5));
  const auto b = run(grid(Algorithm::kOlsb, 2000, 5));
  CHECK(metrics_csv(a) == metrics_csv(b));
  CHECK(a.delivered == b.delivered);
  const auto c = run(grid(Algorithm::kOlsb, 2000, 6));
  CHECK(metrics_csv(a) != metrics_csv(c));
}

TEST_CASE("packets are conserved and levels never rise") {
  for (auto alg : {Algorithm::kOlsb, Algorithm::kBackpressure, Algorithm::kAspr, Algorithm::kUcb1}) {
    CAPTURE(to_string(alg));
    const auto art = run(grid(alg, 3000));
    CHECK(art.invariants.conservation == 0);
    CHECK(art.invariants.monotonicity == 0);
    CHECK(art.invariants.feasibility == 0);
    CHECK(art.invariants.ack_samples == 0);
    CHECK(art.injected == art.delivered + art.in_system);
  }
}

TEST_CASE("ucb1 settles on the cheaper of two paths") {
  const auto art = run(triangle(Algorithm::kUcb1, 0.5));
  const auto& f = art.flows.at(0);
  REQUIRE(f.spanner.size() == 2);
  std::uint64_t total = 0, cheap = 0;
  for (std::size_t i = 0; i < f.final_stats.size(); ++i) {
    total += f.final_stats[i].count;
    if (i == f.shortest) cheap = f.final_stats[i].count;
  }
  CHECK(f.true_means[f.shortest] == doctest::Approx(0.2));
  CHECK(static_cast<double>(cheap) > 0.95 * static_cast<double>(total));
}

TEST_CASE("olsb keeps sampling every spanner path") {
  auto c = triangle(Algorithm::kOlsb, 1.0);
  const auto art = run(c);
  for (const auto& s : art.flows.at(0).final_stats) CHECK(s.count >= 10);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& f = art.flows[0];
    CHECK(std::abs(f.final_stats[i].mean - f.true_means[i]) < 0.02);
  }
}

TEST_CASE("level-0 packets follow the estimated shortest path") {
  auto c = triangle(Algorithm::kOlsb, 0.5);
  // every realised cost falls below C_1, so every packet is injected at level 0
  c.levels = CostLevels({0.0, 0.99, 1.1});
  c.horizon = 4000;
  c.cap = 10;
  c.link_cap = 10;
  const auto art = run(c);
  REQUIRE(art.delivered > 0);
  const auto s = summarize(art);
  CHECK(*s.avg_cost == doctest::Approx(0.2).epsilon(0.02));
  CHECK(*s.avg_delay_us == doctest::Approx(kSlotMicroseconds));
}

TEST_CASE("a lightly loaded link stays bounded") {
  auto c = two_node(0.5);
  c.horizon = 100000;
  c.stride = 1000;
  const auto art = run(c);
  const float peak = *std::max_element(art.queue_avg.begin(), art.queue_avg.end());
  CHECK(peak < 50.0f);
}

TEST_CASE("per-hop acknowledgements delay learning but not traffic") {
  auto a = grid(Algorithm::kOlsb, 2000);
  auto b = a;
  b.ack_mode = AckMode::kPerHop;
  const auto ra = run(a);
  const auto rb = run(b);
  CHECK(ra.injected == rb.injected);
  CHECK(rb.invariants.conservation == 0);
  std::uint64_t obs_a = 0, obs_b = 0;
  for (const auto& f : ra.flows)
    for (const auto& s : f.final_stats) obs_a += s.count;
  for (const auto& f : rb.flows)
    for (const auto& s : f.final_stats) obs_b += s.count;
  CHECK(obs_b <= obs_a);
}

TEST_CASE("hop slack limits path enumeration") {
  auto c = grid(Algorithm::kOlsb, 10);
  const auto loose = run(c);
  c.hop_slack = 0;
  const auto tight = run(c);
  // in a forward grid every path is already a fewest-hop path
  CHECK(tight.flows[0].enumerated == loose.flows[0].enumerated);
  c.hop_slack = -1;
  CHECK_THROWS_AS(run(c), ConfigError);
}

TEST_CASE("invalid configs name the field") {
  auto c = two_node(1.0);
  c.cap = 0;
  try {
    run(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("cap") != std::string::npos);
  }
  c = two_node(1.0);
  c.link_dists.clear();
  CHECK_THROWS_AS(run(c), ConfigError);
  c = two_node(-1.0);
  CHECK_THROWS_AS(run(c), ConfigError);
}

TEST_CASE("oracle estimates with no bonus pick the genie every time") {
  auto c = grid(Algorithm::kOlsb, 3000);
  c.oracle_estimates = true;
  c.zero_bonus = true;
  const auto art = run(c);
  for (const auto& f : art.flows) CHECK(f.genie_matches == f.decisions);
}
