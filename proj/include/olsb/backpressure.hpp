#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "olsb/queueing.hpp"
#include "olsb/topology.hpp"

namespace olsb {

struct BackpressureDecision {
  LinkId link{};
  NodeId dest{};
  int from_level = 0;
  int to_level = 0;
  double pressure = 0.0;
};

/// Q_v - Q_v' when C_{m'} <= max(C_m - w, 0), otherwise -infinity.
double queue_pressure(std::uint32_t q_from, std::uint32_t q_to, double c_m, double c_m_to, double w);

/// Static routing context shared by every node's scheduler.
struct BackpressureContext {
  const Graph* graph = nullptr;
  const CostLevels* levels = nullptr;
  /// can_reach[di][v]: node v has a directed path to destination di.
  std::vector<std::vector<bool>> can_reach;
  /// false drops the budget test (plain backpressure, single level).
  bool budget = true;
  /// Levels below this are not sourced by the pressure rule (level 0 is
  /// forwarded on the estimated shortest path instead).
  int min_source_level = 1;
  /// Link weights are divided by this before the budget test, matching the
  /// normalised cost scale of the levels.
  double weight_norm = 1.0;
};

struct LinkPressure {
  double pressure = 0.0;
  std::optional<BackpressureDecision> best;
};

/// max(max_{d,m,m'} P, 0) for one link, evaluated on `view`. Ties go to the
/// smallest d, then the smallest m, then the largest m'.
LinkPressure link_pressure(const Link& link, const QueueSnapshot& view, const BackpressureContext& ctx,
                           double w);

/// Greedy per-node schedule: repeatedly transmits on the argmax-pressure link
/// while its pressure is positive, at most `cap` packets in total and
/// link_budget[e] per link. On return `view` reflects the
/// packets that left v; receiver counts are restored. link_budget is decremented.
std::vector<BackpressureDecision> schedule_node(NodeId v, QueueSnapshot& view, const BackpressureContext& ctx,
                                                std::span<const double> weights, int cap,
                                                std::vector<int>& link_budget);

/// Next hop for the head of Q_(v,d,0): the first link of the estimated
/// shortest path. Empty when that queue is empty. Throws ConfigError if the
/// path does not lead from v to d.
std::optional<BackpressureDecision> forward_level0(NodeId v, NodeId d, const Path& estimated_shortest,
                                                   const QueueSnapshot& view);

}  // namespace olsb
