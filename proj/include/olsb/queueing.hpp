#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "olsb/topology.hpp"

namespace olsb {

/// Raised when a packet would be moved to a looser cost budget.
class BudgetViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Cost grid 0 = C_0 < C_1 < ... < C_{M-1} < 1 < C_M; queue levels 0..M-1.
class CostLevels {
 public:
  /// values has M+1 entries. Throws ConfigError if the ordering is violated.
  explicit CostLevels(std::vector<double> values);

  /// C_i = i/M for i < M, C_M = 1 + 1/M.
  static CostLevels uniform(std::size_t M);
  /// C_i = i*step for i < M, C_M = top.
  static CostLevels stepped(double step, std::size_t M, double top = 1.1);

  std::size_t count() const { return values_.size() - 1; }  // M
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  /// The i with C_i <= c < C_{i+1}. Costs at or above 1 map to M-1.
  /// Throws std::domain_error for negative or NaN costs.
  int level_of(double c) const;
  /// Largest m' with C_{m'} <= max(C_m - w, 0).
  int max_target_level(int m, double w) const;
  bool transfer_allowed(int m, int m_to, double w) const;

 private:
  std::vector<double> values_;
};

struct Hop {
  LinkId link{};
  double weight = 0.0;  // realised weight, unnormalised
  std::uint8_t level = 0;  // queue level entered after the hop
};

struct Packet {
  std::uint64_t uid = 0;
  std::uint32_t flow = 0;
  NodeId dest{};
  NodeId current{};
  int level = 0;
  int source_level = 0;
  std::int64_t injected_slot = 0;
  double cost_sum = 0.0;  // sum of trace weights
  /// Pinned route (index into the run's route table), or -1 for hop-by-hop.
  std::int32_t route = -1;
  std::uint16_t hop_index = 0;
  std::vector<Hop> trace;
};

/// Immutable copy of every Q_(v,d,m) at one instant.
struct QueueSnapshot {
  std::int64_t slot = 0;
  std::size_t n_nodes = 0;
  std::size_t n_levels = 0;
  std::vector<NodeId> destinations;
  std::vector<std::int32_t> dest_slot;  // per node, -1 if not a destination
  std::vector<std::uint32_t> lengths;

  std::uint32_t at(NodeId v, NodeId d, int m) const;
  /// Q_(v,d,0..M-1) as a contiguous view.
  std::span<const std::uint32_t> levels_at(NodeId v, NodeId d) const;
};

/// FIFO queues per (node, destination, level).
class QueueBank {
 public:
  QueueBank(std::size_t n_nodes, std::vector<NodeId> destinations, std::size_t n_levels);

  std::size_t node_count() const { return n_nodes_; }
  std::size_t level_count() const { return n_levels_; }
  const std::vector<NodeId>& destinations() const { return dests_; }
  /// Dense index of a destination, -1 for nodes that are no flow's destination.
  int dest_index(NodeId d) const { return dest_slot_.at(index_of(d)); }

  /// Appends pkt to Q_(node,dest,m), tightening its budget to level m.
  /// Throws BudgetViolation if m exceeds the packet's current level.
  void enqueue(Packet pkt, NodeId node, NodeId dest, int m);
  std::optional<Packet> dequeue_head(NodeId node, NodeId dest, int m);
  const Packet* peek_head(NodeId node, NodeId dest, int m) const;

  std::uint32_t length(NodeId v, NodeId d, int m) const { return lengths_[slot(v, dest_index(d), m)]; }
  std::uint32_t length_at(std::size_t v, std::size_t di, std::size_t m) const {
    return lengths_[(v * dests_.size() + di) * n_levels_ + m];
  }
  std::span<const std::uint32_t> levels_at(std::size_t v, std::size_t di) const {
    return {lengths_.data() + (v * dests_.size() + di) * n_levels_, n_levels_};
  }
  std::uint64_t node_total(NodeId v) const { return node_totals_[index_of(v)]; }
  std::uint64_t total() const { return total_; }

  QueueSnapshot snapshot_lengths(std::int64_t t) const;
  /// Brings a snapshot previously taken from this bank up to date, copying
  /// only the entries touched since the last refresh.
  void refresh_snapshot(QueueSnapshot& snap, std::int64_t t);

 private:
  void touch(std::size_t s) {
    if (!dirty_flag_[s]) {
      dirty_flag_[s] = 1;
      dirty_.push_back(s);
    }
  }

  std::size_t slot(NodeId v, int di, int m) const;

  std::size_t n_nodes_;
  std::vector<NodeId> dests_;
  std::vector<std::int32_t> dest_slot_;
  std::size_t n_levels_;
  std::vector<std::deque<Packet>> queues_;
  std::vector<std::uint32_t> lengths_;
  std::vector<std::uint64_t> node_totals_;
  std::uint64_t total_ = 0;
  std::vector<std::uint8_t> dirty_flag_;
  std::vector<std::size_t> dirty_;
};

/// Per-link FIFOs for pinned end-to-end routing.
class LinkQueueBank {
 public:
  LinkQueueBank(std::size_t n_nodes, std::size_t n_links) : queues_(n_links), node_totals_(n_nodes, 0) {}

  void enqueue(Packet pkt, const Link& link);
  std::optional<Packet> dequeue_head(const Link& link);
  std::size_t length(LinkId e) const { return queues_[index_of(e)].size(); }
  std::uint64_t node_total(NodeId v) const { return node_totals_[index_of(v)]; }
  std::uint64_t total() const { return total_; }

 private:
  std::vector<std::deque<Packet>> queues_;
  std::vector<std::uint64_t> node_totals_;
  std::uint64_t total_ = 0;
};

}  // namespace olsb
