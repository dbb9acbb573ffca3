#include "olsb/qucb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace olsb {

double exploration_bonus(std::int64_t t, std::uint64_t T) {
  if (T == 0) throw LearnerError("exploration bonus: path never observed");
  if (t <= 1) return 0.0;
  return std::sqrt(2.0 * std::log(static_cast<double>(t)) / static_cast<double>(T));
}

PathLearner::PathLearner(std::vector<Path> paths) : paths_(std::move(paths)) {
  if (paths_.empty()) throw ConfigError("path learner: empty spanner");
  std::sort(paths_.begin(), paths_.end(), [](const Path& a, const Path& b) { return a.id < b.id; });
  stats_.resize(paths_.size());
  for (std::size_t i = 0; i < paths_.size(); ++i) stats_[i].path_id = paths_[i].id;
}

void PathLearner::initialize(std::span<const double> first_obs, std::int64_t t) {
  if (first_obs.size() != paths_.size()) {
    throw LearnerError("initialize: expected " + std::to_string(paths_.size()) + " observations, got " +
                       std::to_string(first_obs.size()));
  }
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    if (!(first_obs[i] >= 0.0 && first_obs[i] <= 1.0)) throw LearnerError("initialize: observation outside [0,1]");
    stats_[i].mean = first_obs[i];
    stats_[i].count = 1;
    stats_[i].last_update_slot = t;
  }
  initialized_ = true;
}

void PathLearner::record(std::uint32_t path_id, double cost, std::int64_t t) {
  auto i = index_of_id(path_id);
  if (!i) throw LearnerError("record: unknown path id " + std::to_string(path_id));
  record_at(*i, cost, t);
}

void PathLearner::record_at(std::size_t index, double cost, std::int64_t t) {
  if (!(cost >= 0.0 && cost <= 1.0)) throw LearnerError("record: cost sample outside [0,1]");
  stats_.at(index).add(cost, t);
}

void PathLearner::pin_means(std::span<const double> means) {
  if (means.size() != paths_.size()) throw LearnerError("pin_means: size mismatch");
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    stats_[i].mean = means[i];
    stats_[i].count = std::max<std::uint64_t>(stats_[i].count, 1);
  }
  initialized_ = true;
}

std::optional<std::size_t> PathLearner::index_of_id(std::uint32_t path_id) const {
  auto it = std::lower_bound(stats_.begin(), stats_.end(), path_id,
                             [](const PathStats& s, std::uint32_t id) { return s.path_id < id; });
  if (it == stats_.end() || it->path_id != path_id) return std::nullopt;
  return static_cast<std::size_t>(it - stats_.begin());
}

std::optional<std::size_t> PathLearner::find_by_links(std::span<const LinkId> links) const {
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    if (std::equal(paths_[i].links.begin(), paths_[i].links.end(), links.begin(), links.end())) return i;
  }
  return std::nullopt;
}

std::size_t PathLearner::best_estimate() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < stats_.size(); ++i) {
    if (stats_[i].mean < stats_[best].mean) best = i;
  }
  return best;
}

Selection qucb_select(std::span<const PathStats> stats, std::span<const std::uint32_t> source_queues,
                      const CostLevels& levels, const IndexParams& params, std::vector<double>* index_out) {
  if (stats.empty()) throw ConfigError("qucb_select: empty spanner");
  if (params.t < 1) throw LearnerError("qucb_select: slot index must be >= 1");
  if (index_out) index_out->assign(stats.size(), 0.0);
  Selection best{0, 0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& s = stats[i];
    const int m = levels.level_of(s.mean);
    double v = params.K * params.scale * s.mean + static_cast<double>(source_queues[static_cast<std::size_t>(m)]);
    if (params.bonus) v -= exploration_bonus(params.t, s.count);
    if (index_out) (*index_out)[i] = v;
    if (v < best.value) best = {i, m, v};
  }
  return best;
}

Selection genie_select(std::span<const double> means, std::span<const std::uint32_t> source_queues,
                       const CostLevels& levels, double K, double scale) {
  if (means.empty()) throw ConfigError("genie_select: empty path set");
  Selection best{0, 0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < means.size(); ++i) {
    const int m = levels.level_of(means[i]);
    const double v = K * scale * means[i] + static_cast<double>(source_queues[static_cast<std::size_t>(m)]);
    if (v < best.value) best = {i, m, v};
  }
  return best;
}

std::size_t ucb_cost_select(std::span<const double> estimates, std::span<const PathStats> stats, std::int64_t t) {
  if (estimates.empty() || estimates.size() != stats.size()) throw ConfigError("ucb_cost_select: bad candidate set");
  std::size_t best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double v = estimates[i] - exploration_bonus(t, stats[i].count);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  return best;
}

}  // namespace olsb
