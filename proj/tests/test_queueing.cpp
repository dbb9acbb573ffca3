#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "olsb/queueing.hpp"

using namespace olsb;

namespace {

CostLevels quarters() { return CostLevels({0.0, 0.25, 0.5, 0.75, 1.25}); }

Packet packet(std::uint64_t uid, int level, NodeId dest = node_id(0)) {
  Packet p;
  p.dest = dest;
  p.uid = uid;
  p.level = level;
  p.source_level = level;
  return p;
}

std::uint64_t snapshot_sum(const QueueSnapshot& s) {
  return std::accumulate(s.lengths.begin(), s.lengths.end(), std::uint64_t{0});
}

}  // namespace

TEST_CASE("level mapping") {
  const auto L = quarters();
  CHECK(L.count() == 4);
  CHECK(L.level_of(0.3) == 1);
  CHECK(L.level_of(0.0) == 0);
  CHECK(L.level_of(1.0) == 3);
  CHECK(L.level_of(0.25) == 1);
  CHECK(L.level_of(0.7499999) == 2);
  CHECK_THROWS_AS(L.level_of(-0.1), std::domain_error);
}

TEST_CASE("level grids") {
  const auto u = CostLevels::uniform(10);
  CHECK(u.count() == 10);
  CHECK(u[3] == doctest::Approx(0.3));
  CHECK(u[10] == doctest::Approx(1.1));
  const auto s = CostLevels::stepped(1.0 / 512, 80);
  CHECK(s.count() == 80);
  CHECK(s[79] == doctest::Approx(79.0 / 512));
  CHECK(s[80] == doctest::Approx(1.1));
  CHECK_THROWS_AS(CostLevels({0.1, 0.5, 1.2}), ConfigError);
  CHECK_THROWS_AS(CostLevels({0.0, 0.5, 0.4, 1.2}), ConfigError);
  CHECK_THROWS_AS(CostLevels({0.0, 0.5, 1.0}), ConfigError);
}

TEST_CASE("transfer budget") {
  const auto L = quarters();
  // C_m' <= max(C_m - w, 0)
  CHECK(L.max_target_level(2, 0.2) == 1);
  CHECK(L.transfer_allowed(2, 1, 0.2));
  CHECK_FALSE(L.transfer_allowed(2, 2, 0.2));
  CHECK(L.max_target_level(1, 0.9) == 0);
  CHECK(L.transfer_allowed(0, 0, 0.5));
}

TEST_CASE("enqueue tightens the budget") {
  QueueBank bank(3, {node_id(2)}, 4);
  bank.enqueue(packet(1, 3, node_id(2)), node_id(0), node_id(2), 1);
  const Packet* head = bank.peek_head(node_id(0), node_id(2), 1);
  REQUIRE(head);
  CHECK(head->level == 1);
  bank.enqueue(packet(2, 0, node_id(2)), node_id(0), node_id(2), 0);
  CHECK(bank.length(node_id(0), node_id(2), 0) == 1);
  CHECK_THROWS_AS(bank.enqueue(packet(3, 1, node_id(2)), node_id(0), node_id(2), 2), BudgetViolation);
}

TEST_CASE("FIFO order") {
  QueueBank bank(2, {node_id(1)}, 2);
  bank.enqueue(packet(1, 1, node_id(1)), node_id(0), node_id(1), 1);
  bank.enqueue(packet(2, 1, node_id(1)), node_id(0), node_id(1), 1);
  auto p = bank.dequeue_head(node_id(0), node_id(1), 1);
  REQUIRE(p);
  CHECK(p->uid == 1);
  CHECK(bank.length(node_id(0), node_id(1), 1) == 1);
  CHECK(bank.dequeue_head(node_id(0), node_id(1), 1)->uid == 2);
  CHECK_FALSE(bank.dequeue_head(node_id(0), node_id(1), 1).has_value());
  bank.enqueue(packet(3, 1, node_id(1)), node_id(0), node_id(1), 1);
  CHECK(bank.dequeue_head(node_id(0), node_id(1), 1)->uid == 3);
}

TEST_CASE("snapshots") {
  QueueBank bank(3, {node_id(2)}, 4);
  auto s0 = bank.snapshot_lengths(0);
  CHECK(snapshot_sum(s0) == 0);
  bank.enqueue(packet(1, 2, node_id(2)), node_id(1), node_id(2), 2);
  const auto s1 = bank.snapshot_lengths(1);
  CHECK(snapshot_sum(s1) == 1);
  CHECK(s1.at(node_id(1), node_id(2), 2) == 1);
  CHECK(s1.levels_at(node_id(1), node_id(2))[2] == 1);
  bank.dequeue_head(node_id(1), node_id(2), 2);
  CHECK(snapshot_sum(bank.snapshot_lengths(2)) == 0);
  CHECK(snapshot_sum(s1) == 1);  // snapshots are values
}

TEST_CASE("incremental refresh matches a fresh snapshot") {
  QueueBank bank(4, {node_id(2), node_id(3)}, 3);
  QueueSnapshot view = bank.snapshot_lengths(0);
  std::uint64_t uid = 1;
  for (int t = 1; t <= 200; ++t) {
    const auto v = node_id(static_cast<std::size_t>(t % 2));
    const auto d = node_id(2 + static_cast<std::size_t>(t % 3 == 0));
    const int m = t % 3;
    if (t % 5 == 0) {
      bank.dequeue_head(v, d, m);
    } else {
      bank.enqueue(packet(uid++, 2, d), v, d, m);
    }
    bank.refresh_snapshot(view, t);
    const auto fresh = bank.snapshot_lengths(t);
    CHECK(view.lengths == fresh.lengths);
    CHECK(view.slot == t);
  }
  CHECK(bank.total() == std::accumulate(view.lengths.begin(), view.lengths.end(), std::uint64_t{0}));
}

TEST_CASE("link queues") {
  const Graph g(3, {{node_id(0), node_id(1)}, {node_id(1), node_id(2)}});
  LinkQueueBank lq(3, 2);
  lq.enqueue(packet(1, 0), g.link(link_id(0)));
  lq.enqueue(packet(2, 0), g.link(link_id(0)));
  CHECK(lq.length(link_id(0)) == 2);
  CHECK(lq.node_total(node_id(0)) == 2);
  CHECK(lq.dequeue_head(g.link(link_id(0)))->uid == 1);
  CHECK(lq.total() == 1);
  CHECK_FALSE(lq.dequeue_head(g.link(link_id(1))).has_value());
}
