#include "olsb/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace olsb {

CostLevels::CostLevels(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw ConfigError("cost levels: need at least C_0 and C_1");
  if (values_.front() != 0.0) throw ConfigError("cost levels: C_0 must be 0");
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (!(values_[i] > values_[i - 1])) throw ConfigError("cost levels: values must be strictly increasing");
  }
  const std::size_t M = values_.size() - 1;
  if (!(values_[M - 1] < 1.0 && values_[M] > 1.0)) {
    throw ConfigError("cost levels: need C_{M-1} < 1 < C_M");
  }
}

CostLevels CostLevels::uniform(std::size_t M) {
  if (M < 1) throw ConfigError("cost levels: M must be >= 1");
  std::vector<double> v(M + 1);
  for (std::size_t i = 0; i < M; ++i) v[i] = static_cast<double>(i) / static_cast<double>(M);
  v[M] = 1.0 + 1.0 / static_cast<double>(M);
  return CostLevels(std::move(v));
}

CostLevels CostLevels::stepped(double step, std::size_t M, double top) {
  if (M < 1) throw ConfigError("cost levels: M must be >= 1");
  if (!(step > 0.0)) throw ConfigError("cost levels: step must be > 0");
  std::vector<double> v(M + 1);
  for (std::size_t i = 0; i < M; ++i) v[i] = static_cast<double>(i) * step;
  v[M] = top;
  return CostLevels(std::move(v));
}

int CostLevels::level_of(double c) const {
  if (!(c >= 0.0)) throw std::domain_error("level_of: cost must be >= 0");
  const std::size_t M = count();
  // first index with C_i > c, minus one
  auto it = std::upper_bound(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(M), c);
  return static_cast<int>(it - values_.begin()) - 1;
}

int CostLevels::max_target_level(int m, double w) const {
  const double budget = std::max(values_[static_cast<std::size_t>(m)] - w, 0.0);
  return level_of(budget);
}

bool CostLevels::transfer_allowed(int m, int m_to, double w) const {
  return values_[static_cast<std::size_t>(m_to)] <= std::max(values_[static_cast<std::size_t>(m)] - w, 0.0);
}

std::uint32_t QueueSnapshot::at(NodeId v, NodeId d, int m) const {
  const auto di = dest_slot.at(index_of(d));
  if (di < 0) return 0;
  return lengths[(index_of(v) * destinations.size() + static_cast<std::size_t>(di)) * n_levels +
                 static_cast<std::size_t>(m)];
}

std::span<const std::uint32_t> QueueSnapshot::levels_at(NodeId v, NodeId d) const {
  const auto di = dest_slot.at(index_of(d));
  if (di < 0) throw std::out_of_range("snapshot: node is not a destination");
  return {lengths.data() + (index_of(v) * destinations.size() + static_cast<std::size_t>(di)) * n_levels, n_levels};
}

QueueBank::QueueBank(std::size_t n_nodes, std::vector<NodeId> destinations, std::size_t n_levels)
    : n_nodes_(n_nodes), dests_(std::move(destinations)), dest_slot_(n_nodes, -1), n_levels_(n_levels) {
  if (n_levels_ == 0) throw ConfigError("queue bank: need at least one level");
  for (std::size_t i = 0; i < dests_.size(); ++i) {
    const auto d = index_of(dests_[i]);
    if (d >= n_nodes_) throw ConfigError("queue bank: destination out of range");
    if (dest_slot_[d] >= 0) throw ConfigError("queue bank: duplicate destination");
    dest_slot_[d] = static_cast<std::int32_t>(i);
  }
  const std::size_t n = n_nodes_ * dests_.size() * n_levels_;
  queues_.resize(n);
  lengths_.assign(n, 0);
  dirty_flag_.assign(n, 0);
  node_totals_.assign(n_nodes_, 0);
}

std::size_t QueueBank::slot(NodeId v, int di, int m) const {
  if (di < 0) throw std::out_of_range("queue bank: node is not a destination");
  if (m < 0 || static_cast<std::size_t>(m) >= n_levels_) throw std::out_of_range("queue bank: level out of range");
  const auto vi = index_of(v);
  if (vi >= n_nodes_) throw std::out_of_range("queue bank: node out of range");
  return (vi * dests_.size() + static_cast<std::size_t>(di)) * n_levels_ + static_cast<std::size_t>(m);
}

void QueueBank::enqueue(Packet pkt, NodeId node, NodeId dest, int m) {
  if (pkt.dest != dest) throw std::logic_error("enqueue: packet destination mismatch");
  if (m > pkt.level) {
    throw BudgetViolation("enqueue: packet " + std::to_string(pkt.uid) + " at level " + std::to_string(pkt.level) +
                          " cannot move to looser level " + std::to_string(m));
  }
  const std::size_t s = slot(node, dest_index(dest), m);
  pkt.level = m;
  pkt.current = node;
  queues_[s].push_back(std::move(pkt));
  ++lengths_[s];
  touch(s);
  ++node_totals_[index_of(node)];
  ++total_;
}

std::optional<Packet> QueueBank::dequeue_head(NodeId node, NodeId dest, int m) {
  const std::size_t s = slot(node, dest_index(dest), m);
  auto& q = queues_[s];
  if (q.empty()) return std::nullopt;
  Packet p = std::move(q.front());
  q.pop_front();
  --lengths_[s];
  touch(s);
  --node_totals_[index_of(node)];
  --total_;
  return p;
}

const Packet* QueueBank::peek_head(NodeId node, NodeId dest, int m) const {
  const auto& q = queues_[slot(node, dest_index(dest), m)];
  return q.empty() ? nullptr : &q.front();
}

QueueSnapshot QueueBank::snapshot_lengths(std::int64_t t) const {
  return QueueSnapshot{t, n_nodes_, n_levels_, dests_, dest_slot_, lengths_};
}

void QueueBank::refresh_snapshot(QueueSnapshot& snap, std::int64_t t) {
  if (snap.lengths.size() != lengths_.size() || snap.n_levels != n_levels_) {
    snap = snapshot_lengths(t);
  } else {
    snap.slot = t;
    for (std::size_t s : dirty_) snap.lengths[s] = lengths_[s];
  }
  for (std::size_t s : dirty_) dirty_flag_[s] = 0;
  dirty_.clear();
}

void LinkQueueBank::enqueue(Packet pkt, const Link& link) {
  pkt.current = link.src;
  queues_[index_of(link.id)].push_back(std::move(pkt));
  ++node_totals_[index_of(link.src)];
  ++total_;
}

std::optional<Packet> LinkQueueBank::dequeue_head(const Link& link) {
  auto& q = queues_[index_of(link.id)];
  if (q.empty()) return std::nullopt;
  Packet p = std::move(q.front());
  q.pop_front();
  --node_totals_[index_of(link.src)];
  --total_;
  return p;
}

}  // namespace olsb
