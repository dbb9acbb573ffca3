#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "olsb/queueing.hpp"
#include "olsb/sim.hpp"

namespace olsb {

/// (K*scale*C + Q_(s,d,m(C))) - min_p (K*scale*mu_p + Q_(s,d,m(mu_p))) with
/// both terms read from the same source queue snapshot.
double regret_increment(double realized_cost, std::span<const std::uint32_t> source_queues,
                        std::span<const double> means, const CostLevels& levels, double K, double scale = 1.0);

struct BoundInputs {
  double K = 1.0;           // effective weight on the mean cost
  std::vector<double> mu;   // per spanner path
  std::vector<double> eta;  // mean source queue at level m(mu_i), per path
};

struct BoundReport {
  std::size_t L = 0;
  double K = 0.0;
  std::vector<double> psi;
  std::vector<double> delta_min;
  double bound_as_printed = 0.0;
  double bound_clamped = 0.0;  // psi replaced by max(psi, 0)
};

/// 8 * sum_{delta_i != 0} psi_i ln n / delta_i^2 + (L-1)(1 + pi^2/3) sum_i psi_i.
BoundReport theorem1_bound(const BoundInputs& in, double n);
BoundInputs bound_inputs(const FlowReport& flow, const CostLevels& levels, double K_effective);
/// Per-flow reports and their sum, evaluated at horizon n.
std::vector<BoundReport> run_bounds(const RunArtifact& art, double n);
nlohmann::json to_json(const BoundReport& b);

struct RunSummary {
  std::optional<double> avg_delay_us;  // undefined without deliveries
  double avg_queue_len = 0.0;
  std::optional<double> avg_cost;
  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
  std::uint64_t in_system = 0;
  double regret_final = 0.0;
  double source_shortest_queue = 0.0;  // mean over flows
};

RunSummary summarize(const RunArtifact& art);
nlohmann::json summary_json(const RunArtifact& art, const RunSummary& s);

/// One row per sampled slot: slot, regret_inc, regret_cum, regret_over_ln_t,
/// avg_queue_len, deliveries, avg_delay_us, chosen_path, genie_path.
std::string metrics_csv(const RunArtifact& art);
std::string decision_log_csv(const RunArtifact& art);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double rss = 0.0;
  double aic = 0.0;  // n ln(RSS/n) + 2k with k = 2
  std::size_t n = 0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanStderr mean_stderr(std::span<const double> v);
/// Mean of series[begin, end) (0-based indices, clipped to the series).
double window_mean(std::span<const float> series, std::size_t begin, std::size_t end);

}  // namespace olsb
