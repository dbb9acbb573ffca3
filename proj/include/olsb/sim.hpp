#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "olsb/link_model.hpp"
#include "olsb/qucb.hpp"
#include "olsb/queueing.hpp"
#include "olsb/topology.hpp"

namespace olsb {

inline constexpr double kSlotMicroseconds = 20.0;

enum class Algorithm { kOlsb, kBackpressure, kAspr, kUcb1 };
enum class AckMode { kInstant, kPerHop };
enum class GenieSet { kSpanner, kAllPaths };

std::string_view to_string(Algorithm a);
std::string_view to_string(AckMode a);
std::string_view to_string(GenieSet g);
Algorithm parse_algorithm(std::string_view s);
AckMode parse_ack_mode(std::string_view s);
GenieSet parse_genie_set(std::string_view s);

struct FlowSpec {
  std::uint32_t id = 0;
  NodeId src{};
  NodeId dst{};
  double rate = 0.0;  // packets per slot
};

struct SimConfig {
  std::shared_ptr<const Graph> graph;
  std::vector<FlowSpec> flows;
  std::vector<WeightDistribution> link_dists;
  CostLevels levels = CostLevels::uniform(10);
  double K = 1.0;
  /// Multiplies the normalised path cost inside the injection objective and
  /// the regret; 1 keeps the plain normalised objective.
  double objective_scale = 1.0;
  std::int64_t horizon = 0;
  std::uint64_t seed = 1;
  Algorithm algorithm = Algorithm::kOlsb;
  int cap = 1;       // packets a node may send per slot
  int link_cap = 1;  // packets a link may carry per slot
  AckMode ack_mode = AckMode::kInstant;
  GenieSet genie_set = GenieSet::kSpanner;
  std::size_t max_hops = 0;  // 0: |V| - 1
  /// Per (v, d), paths may exceed the fewest-hop count by at most this much.
  std::optional<int> hop_slack;
  std::size_t max_paths = 0;
  double spanner_C = 2.0;
  std::int64_t stride = 100;
  bool check_invariants = true;
  /// Pins every estimate to its true mean and stops learning.
  bool oracle_estimates = false;
  bool zero_bonus = false;
  bool decision_log = false;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct MetricsRow {
  std::int64_t slot = 0;
  double regret_inc = 0.0;  // sum over the rows's window
  double regret_cum = 0.0;
  double avg_queue_len = 0.0;
  std::uint64_t deliveries = 0;  // in the window
  std::optional<double> avg_delay_us;
  std::vector<std::int64_t> chosen_path;  // per flow, -1 when no decision in the window
  std::vector<std::int64_t> genie_path;
};

struct DecisionRecord {
  std::int64_t slot = 0;
  std::uint32_t flow = 0;
  std::uint32_t chosen = 0;
  std::vector<double> index_values;
};

struct FlowReport {
  FlowSpec spec;
  std::size_t enumerated = 0;
  std::vector<Path> spanner;
  double spanner_bound = 1.0;
  std::vector<double> true_means;  // per spanner path, normalised
  std::vector<PathStats> final_stats;
  std::size_t shortest = 0;  // spanner index with the smallest true mean
  int shortest_level = 0;
  std::vector<double> eta;  // time-average of Q_(s,d,m) over the second half
  double source_shortest_queue = 0.0;  // time-average of Q_(s,d,m(mu_min))
  std::uint64_t decisions = 0;
  std::uint64_t genie_matches = 0;
  std::vector<std::uint64_t> concentration_ok;  // per spanner path
  std::uint64_t concentration_samples = 0;
};

struct InvariantReport {
  std::uint64_t conservation = 0;
  std::uint64_t monotonicity = 0;
  std::uint64_t compliance = 0;
  std::uint64_t compliance_checked = 0;
  double max_compliance_excess = 0.0;
  std::uint64_t feasibility = 0;
  std::uint64_t ack_samples = 0;  // weight samples carried by ACKs; always 0
};

struct RunArtifact {
  SimConfig config;
  std::vector<MetricsRow> rows;
  std::vector<double> regret_cum;  // entry t-1 is R_t
  std::vector<float> queue_avg;    // entry t-1 is the per-node mean queue after slot t
  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
  std::uint64_t in_system = 0;
  double delay_sum_slots = 0.0;
  double delivered_cost_sum = 0.0;  // normalised realised cost of delivered packets
  std::vector<FlowReport> flows;
  std::size_t learner_count = 0;
  InvariantReport invariants;
  std::vector<DecisionRecord> decision_log;
};

/// Poisson draw by inversion from a single uniform.
std::uint32_t poisson_draw(double lambda, CounterStream& rng);
std::uint32_t arrivals(const FlowSpec& flow, std::int64_t t, std::uint64_t seed);

/// Executes initialisation probes and `horizon` slots. Deterministic in the
/// config. Propagates ConfigError.
RunArtifact run(const SimConfig& config);

}  // namespace olsb
