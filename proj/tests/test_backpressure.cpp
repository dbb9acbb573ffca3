#include <doctest.h>

#include <cmath>
#include <limits>

#include "olsb/backpressure.hpp"

using namespace olsb;

namespace {

CostLevels quarters() { return CostLevels({0.0, 0.25, 0.5, 0.75, 1.25}); }

void fill(QueueBank& bank, NodeId v, NodeId d, int m, int n) {
  static std::uint64_t uid = 1;
  for (int i = 0; i < n; ++i) {
    Packet p;
    p.uid = uid++;
    p.level = m;
    p.source_level = m;
    p.dest = d;
    bank.enqueue(p, v, d, m);
  }
}

struct Net {
  Graph g;
  CostLevels levels = quarters();
  BackpressureContext ctx;
  QueueBank bank;
  NodeId dest;

  Net(std::size_t n, std::vector<std::pair<NodeId, NodeId>> links, NodeId d, bool budget = true)
      : g(n, links), bank(n, {d}, budget ? 4 : 1), dest(d) {
    ctx.graph = &g;
    ctx.levels = &levels;
    ctx.can_reach.push_back(g.reachable_to(d));
    ctx.budget = budget;
    ctx.min_source_level = budget ? 1 : 0;
    ctx.weight_norm = 1.0;
  }
};

}  // namespace

TEST_CASE("pairwise pressure") {
  CHECK(queue_pressure(7, 3, 0.5, 0.25, 0.2) == 4.0);
  CHECK(queue_pressure(7, 3, 0.5, 0.5, 0.2) == -std::numeric_limits<double>::infinity());
  CHECK(queue_pressure(5, 5, 0.5, 0.25, 0.2) == 0.0);
  // an exhausted budget still admits level 0
  CHECK(queue_pressure(2, 0, 0.25, 0.0, 0.9) == 2.0);
}

TEST_CASE("link pressure picks the best feasible level pair") {
  // 0 -> 1 -> 2, destination 2
  Net n(3, {{node_id(0), node_id(1)}, {node_id(1), node_id(2)}}, node_id(2));
  fill(n.bank, node_id(0), n.dest, 2, 7);
  fill(n.bank, node_id(0), n.dest, 1, 1);
  fill(n.bank, node_id(1), n.dest, 0, 3);
  fill(n.bank, node_id(1), n.dest, 1, 3);
  fill(n.bank, node_id(1), n.dest, 2, 0);
  const auto view = n.bank.snapshot_lengths(1);
  // candidates: (m=2 -> m'=1) 4, (m=1 -> m'=0) -2, (m=2 -> m'=2) infeasible
  const auto lp = link_pressure(n.g.link(link_id(0)), view, n.ctx, 0.2);
  CHECK(lp.pressure == 4.0);
  REQUIRE(lp.best);
  CHECK(lp.best->from_level == 2);
  CHECK(lp.best->to_level == 1);  // equal receiver queues keep the larger budget
  CHECK(n.levels.transfer_allowed(lp.best->from_level, lp.best->to_level, 0.2));
}

TEST_CASE("link pressure clamps at zero") {
  Net n(3, {{node_id(0), node_id(1)}, {node_id(1), node_id(2)}}, node_id(2));
  const auto empty = link_pressure(n.g.link(link_id(0)), n.bank.snapshot_lengths(0), n.ctx, 0.1);
  CHECK(empty.pressure == 0.0);
  CHECK_FALSE(empty.best);
  fill(n.bank, node_id(0), n.dest, 1, 2);
  for (int m = 0; m < 4; ++m) fill(n.bank, node_id(1), n.dest, m, 5);
  const auto uphill = link_pressure(n.g.link(link_id(0)), n.bank.snapshot_lengths(1), n.ctx, 0.1);
  CHECK(uphill.pressure == 0.0);
  CHECK_FALSE(uphill.best);
}

TEST_CASE("delivery link sees an empty receiver") {
  Net n(2, {{node_id(0), node_id(1)}}, node_id(1));
  fill(n.bank, node_id(0), n.dest, 3, 2);
  const auto lp = link_pressure(n.g.link(link_id(0)), n.bank.snapshot_lengths(1), n.ctx, 0.7);
  CHECK(lp.pressure == 2.0);
  REQUIRE(lp.best);
  CHECK(lp.best->to_level == 0);
}

TEST_CASE("node schedule transmits on the argmax link") {
  // 0 -> {1, 2} -> 3
  Net n(4, {{node_id(0), node_id(1)}, {node_id(0), node_id(2)}, {node_id(1), node_id(3)}, {node_id(2), node_id(3)}},
        node_id(3));
  fill(n.bank, node_id(0), n.dest, 3, 6);
  for (int m = 0; m < 4; ++m) fill(n.bank, node_id(1), n.dest, m, 2);
  for (int m = 0; m < 4; ++m) fill(n.bank, node_id(2), n.dest, m, 4);
  auto view = n.bank.snapshot_lengths(1);
  const auto before = view.lengths;
  std::vector<double> w{0.1, 0.1, 0.1, 0.1};
  std::vector<int> budget(4, 1);
  const auto moves = schedule_node(node_id(0), view, n.ctx, w, 1, budget);
  REQUIRE(moves.size() == 1);
  CHECK(moves[0].link == link_id(0));  // pressure 4 beats 2
  CHECK(moves[0].pressure == 4.0);
  CHECK(budget[0] == 0);
  // sender decremented, receivers restored
  CHECK(view.at(node_id(0), n.dest, 3) == 5);
  CHECK(view.at(node_id(1), n.dest, moves[0].to_level) == before[(1 * 1) * 4 + static_cast<std::size_t>(moves[0].to_level)]);
}

TEST_CASE("capacity limits and zero pressure") {
  Net n(3, {{node_id(0), node_id(1)}, {node_id(1), node_id(2)}}, node_id(2));
  fill(n.bank, node_id(0), n.dest, 3, 10);
  auto view = n.bank.snapshot_lengths(1);
  std::vector<double> w{0.1, 0.1};
  std::vector<int> budget{2, 2};
  CHECK(schedule_node(node_id(0), view, n.ctx, w, 5, budget).size() == 2);  // link cap
  std::vector<int> wide{9, 9};
  auto view2 = n.bank.snapshot_lengths(1);
  CHECK(schedule_node(node_id(0), view2, n.ctx, w, 3, wide).size() == 3);  // node cap
  // nothing queued at node 1: no transmission
  std::vector<int> b3{9, 9};
  CHECK(schedule_node(node_id(1), view2, n.ctx, w, 3, b3).empty());
}

TEST_CASE("plain backpressure ignores budgets") {
  Net n(3, {{node_id(0), node_id(1)}, {node_id(1), node_id(2)}}, node_id(2), false);
  fill(n.bank, node_id(0), n.dest, 0, 3);
  fill(n.bank, node_id(1), n.dest, 0, 1);
  const auto lp = link_pressure(n.g.link(link_id(0)), n.bank.snapshot_lengths(1), n.ctx, 1.0);
  CHECK(lp.pressure == 2.0);
}

TEST_CASE("level-0 forwarding follows the estimated shortest path") {
  Net n(3, {{node_id(0), node_id(1)}, {node_id(1), node_id(2)}, {node_id(0), node_id(2)}}, node_id(2));
  const Path direct = make_path(n.g, 0, {link_id(2)});
  const Path twohop = make_path(n.g, 1, {link_id(0), link_id(1)});
  CHECK_FALSE(forward_level0(node_id(0), n.dest, direct, n.bank.snapshot_lengths(0)));
  fill(n.bank, node_id(0), n.dest, 0, 1);
  const auto d = forward_level0(node_id(0), n.dest, direct, n.bank.snapshot_lengths(1));
  REQUIRE(d);
  CHECK(d->link == link_id(2));
  CHECK(forward_level0(node_id(0), n.dest, twohop, n.bank.snapshot_lengths(1))->link == link_id(0));
  CHECK_THROWS_AS(forward_level0(node_id(1), n.dest, direct, n.bank.snapshot_lengths(1)), ConfigError);
}
