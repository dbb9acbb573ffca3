#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "olsb/queueing.hpp"
#include "olsb/topology.hpp"

namespace olsb {

class LearnerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PathStats {
  std::uint32_t path_id = 0;
  double mean = 0.0;  // running estimate of the normalised path cost
  std::uint64_t count = 0;
  std::int64_t last_update_slot = -1;

  void add(double x, std::int64_t t) {
    ++count;
    mean += (x - mean) / static_cast<double>(count);
    last_update_slot = t;
  }
};

/// sqrt(2 ln t / T); zero for t <= 1.
double exploration_bonus(std::int64_t t, std::uint64_t T);

/// Estimates over the spanner paths of one (node, destination) pair.
class PathLearner {
 public:
  explicit PathLearner(std::vector<Path> paths);

  const std::vector<Path>& paths() const { return paths_; }
  const std::vector<PathStats>& stats() const { return stats_; }
  std::size_t size() const { return paths_.size(); }
  bool initialized() const { return initialized_; }

  /// One first observation per path: C_bar = obs, T = 1.
  void initialize(std::span<const double> first_obs, std::int64_t t = 0);
  /// Adds one realised cost sample for the path with the given id.
  void record(std::uint32_t path_id, double cost, std::int64_t t);
  void record_at(std::size_t index, double cost, std::int64_t t);
  /// Replaces the estimates (oracle experiments).
  void pin_means(std::span<const double> means);

  std::optional<std::size_t> index_of_id(std::uint32_t path_id) const;
  std::optional<std::size_t> find_by_links(std::span<const LinkId> links) const;
  /// argmin of the mean estimate, ties to the lowest id.
  std::size_t best_estimate() const;

 private:
  std::vector<Path> paths_;
  std::vector<PathStats> stats_;
  bool initialized_ = false;
};

struct IndexParams {
  double K = 1.0;
  /// Multiplies the normalised cost in the objective only.
  double scale = 1.0;
  std::int64_t t = 1;
  bool bonus = true;
};

struct Selection {
  std::size_t index = 0;  // into the candidate list
  int level = 0;          // m of the candidate's cost estimate
  double value = 0.0;
};

/// argmin_p K*scale*C_bar_p + Q_(s,d,m(C_bar_p)) - sqrt(2 ln t / T_p).
/// source_queues holds Q_(s,d,0..M-1) from the decision snapshot.
Selection qucb_select(std::span<const PathStats> stats, std::span<const std::uint32_t> source_queues,
                      const CostLevels& levels, const IndexParams& params,
                      std::vector<double>* index_out = nullptr);

/// argmin_p K*scale*mu_p + Q_(s,d,m(mu_p)).
Selection genie_select(std::span<const double> means, std::span<const std::uint32_t> source_queues,
                       const CostLevels& levels, double K, double scale = 1.0);

/// Cost-only index C_bar_p - sqrt(2 ln t / T_p) used by the UCB1 and
/// adaptive shortest-path baselines.
std::size_t ucb_cost_select(std::span<const double> estimates, std::span<const PathStats> stats, std::int64_t t);

}  // namespace olsb
