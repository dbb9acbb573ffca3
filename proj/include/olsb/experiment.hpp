#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "olsb/analytics.hpp"
#include "olsb/config.hpp"
#include "olsb/sim.hpp"

namespace olsb {

/// One cell of the sweep product.
struct RunPoint {
  SimConfig config;
  std::string label;     // e.g. olsb_K0.1_lam1.5_seed3; baselines carry no K
  nlohmann::json point;  // the resolved config narrowed to this point
};

/// algorithm x arrival rate x K x seed, in that nesting order. Baselines
/// ignore K and get a single point per (rate, seed).
std::vector<RunPoint> expand_points(const ExperimentSpec& spec);

struct PointOutcome {
  RunPoint point;
  RunSummary summary;
  std::vector<BoundReport> bounds;
  InvariantReport invariants;
  std::filesystem::path dir;  // empty when nothing was written
};

struct SweepOptions {
  std::size_t workers = 1;
  /// Root directory for per-point artifacts; empty keeps everything in memory.
  std::filesystem::path out;
};

/// Called once per finished point, serialised across workers.
using PointSink = std::function<void(const RunPoint&, const RunArtifact&)>;

/// Runs every point, at most `workers` at a time. The outcome order matches
/// expand_points regardless of completion order. The first failing point's
/// exception is rethrown after the others finish.
std::vector<PointOutcome> run_sweep(const ExperimentSpec& spec, const SweepOptions& opts,
                                    const PointSink& sink = {});

/// manifest.json: point config, its hash, topology hash and spanner contents.
nlohmann::json manifest_json(const ExperimentSpec& spec, const RunPoint& point, const RunArtifact& art);

/// Writes metrics.csv, manifest.json, summary.json, bounds.json and (when
/// enabled) decisions.csv under dir.
void write_point(const std::filesystem::path& dir, const ExperimentSpec& spec, const RunPoint& point,
                 const RunArtifact& art);

struct AggregateRow {
  Algorithm algorithm{};
  double K = 0.0;
  double arrival_rate = 0.0;
  std::size_t seeds = 0;
  MeanStderr delay_us;
  MeanStderr queue_len;
  MeanStderr regret;
  MeanStderr source_shortest_queue;
  MeanStderr cost;
};

/// Mean and stderr across seeds for each (algorithm, K, rate).
std::vector<AggregateRow> aggregate(const std::vector<PointOutcome>& outcomes);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);

/// Writes text to path through a sibling temp file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& text);

/// Bound reports for a finished point, rebuilt from its summary.json.
std::vector<BoundReport> bounds_from_summary(const nlohmann::json& summary, double n);

/// Three load regimes, OLSB at every K plus the three baselines. Emits
/// per-point artifacts under out/<regime>/ and figure-ready CSVs in out/.
struct ReproduceOptions {
  std::filesystem::path config_dir;  // holds {light,moderate,high}.json
  std::filesystem::path out;
  std::size_t workers = 1;
  std::int64_t slots = 0;   // 0 keeps the configs' horizon
  std::size_t seeds = 0;    // 0 keeps the configs' seed list
};
void reproduce_paper_suite(const ReproduceOptions& opts);

}  // namespace olsb
