#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "olsb/analytics.hpp"
#include "olsb/config.hpp"
#include "olsb/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace olsb;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInvalid = 3;

struct RunFlags {
  std::string config;
  std::optional<std::int64_t> slots;
  std::optional<std::string> seeds;
  std::vector<double> k;
  std::vector<double> lambda;
  std::vector<std::string> algorithm;
  std::size_t workers = 1;
  std::optional<std::string> out;
  std::optional<std::int64_t> stride;
  std::optional<std::string> ack_mode;
  bool decision_log = false;
};

// "20" is a seed count starting at 1; "3,5,9" is an explicit list.
json seeds_json(const std::string& s) {
  if (s.find(',') == std::string::npos) {
    const long n = std::stol(s);
    if (n < 1) throw ConfigError("--seeds: must be >= 1");
    return {{"base", 1}, {"count", n}};
  }
  json list = json::array();
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) list.push_back(std::stoull(tok));
  return list;
}

json apply_overrides(json j, const RunFlags& f) {
  if (f.slots) j["slots"] = *f.slots;
  if (f.seeds) j["seeds"] = seeds_json(*f.seeds);
  if (!f.k.empty()) j["K"] = f.k;
  if (!f.lambda.empty()) j["arrival_rate"] = f.lambda;
  if (!f.algorithm.empty()) j["algorithm"] = f.algorithm;
  if (f.stride) j["stride"] = *f.stride;
  if (f.ack_mode) j["ack_mode"] = *f.ack_mode;
  if (f.decision_log) j["decision_log"] = true;
  return j;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

int cmd_run(const RunFlags& f) {
  auto src = read_config_source(f.config);
  const ExperimentSpec spec = parse_experiment(apply_overrides(src.config, f), src.base_dir);
  SweepOptions so;
  so.workers = f.workers;
  // a relative "out" in the config resolves against the config's directory
  so.out = f.out ? fs::path(*f.out) : (fs::path(spec.out_dir).is_absolute() ? fs::path(spec.out_dir)
                                                                             : src.base_dir / spec.out_dir);
  const auto outcomes = run_sweep(spec, so);
  std::cout << "algorithm      K      lambda  seeds  delay_us            queue_len           regret\n";
  for (const auto& r : aggregate(outcomes)) {
    std::printf("%-14s %-6s %-7s %-6zu %-9s +- %-6s %-9s +- %-6s %s\n", std::string(to_string(r.algorithm)).c_str(),
                r.algorithm == Algorithm::kOlsb ? fmt(r.K).c_str() : "-", fmt(r.arrival_rate).c_str(), r.seeds,
                fmt(r.delay_us.mean).c_str(), fmt(r.delay_us.stderr_).c_str(), fmt(r.queue_len.mean).c_str(),
                fmt(r.queue_len.stderr_).c_str(),
                r.algorithm == Algorithm::kOlsb ? (fmt(r.regret.mean) + " +- " + fmt(r.regret.stderr_)).c_str() : "-");
  }
  std::uint64_t violations = 0;
  for (const auto& o : outcomes) {
    violations += o.invariants.conservation + o.invariants.monotonicity + o.invariants.feasibility;
  }
  std::cout << outcomes.size() << " runs written to " << so.out.string() << "\n";
  if (violations) {
    std::cerr << "invariant violations: " << violations << "\n";
    return kExitRuntime;
  }
  return 0;
}

int cmd_bound(const std::string& run_dir, std::optional<double> n) {
  const fs::path summary_path = fs::path(run_dir) / "summary.json";
  if (!fs::exists(summary_path)) throw MissingConfig("no summary.json under " + run_dir);
  const json summary = read_json_file(summary_path);
  if (summary.at("algorithm") != "olsb") throw ConfigError("algorithm: bounds exist for olsb runs only");
  const double horizon = n ? *n : summary.at("slots").get<double>();
  const auto reports = bounds_from_summary(summary, horizon);
  json flows = json::array();
  double printed = 0, clamped = 0;
  for (const auto& b : reports) {
    flows.push_back(to_json(b));
    printed += b.bound_as_printed;
    clamped += b.bound_clamped;
  }
  json out{{"n", horizon},
           {"regret_final", summary.at("regret_final")},
           {"flows", flows},
           {"total_as_printed", printed},
           {"total_clamped", clamped}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_validate(const std::string& path) {
  const ExperimentSpec spec = load_experiment(path);
  std::size_t points = expand_points(spec).size();
  std::cout << "ok: " << spec.name << " (" << points << " points, topology " << spec.topology_sha1 << ")\n";
  return 0;
}

Coord parse_coord(const std::string& s) {
  Coord c;
  if (std::sscanf(s.c_str(), "%d,%d", &c.row, &c.col) != 2) throw ConfigError("bad coordinate '" + s + "'");
  return c;
}

int cmd_topology(const std::string& file, int rows, int cols, bool forward, const std::vector<std::string>& extras,
                 const std::string& note, const std::string& out) {
  if (!file.empty()) {
    if (!fs::exists(file)) throw MissingConfig("topology file not found: " + file);
    const auto t = load_topology(file);
    std::cout << "nodes " << t.graph.node_count() << "\nlinks " << t.graph.link_count() << "\nsha1 "
              << git_blob_sha1(dump_topology(t.graph, t.note)) << "\nnote " << t.note << "\n";
    return 0;
  }
  std::vector<ExtraLink> ex;
  for (const auto& e : extras) {
    const auto colon = e.find(':');
    if (colon == std::string::npos) throw ConfigError("--extra expects r,c:r,c");
    ex.push_back({parse_coord(e.substr(0, colon)), parse_coord(e.substr(colon + 1))});
  }
  const Graph g =
      build_grid_network(rows, cols, ex, forward ? GridOrientation::kForward : GridOrientation::kBidirectional);
  const std::string text = dump_topology(g, note);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_atomic(out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OLSB routing simulator"};
  app.require_subcommand(1);

  RunFlags rf;
  auto* run = app.add_subcommand("run", "run a config's sweep and write per-point artifacts");
  run->add_option("--config", rf.config, "experiment config or run manifest")->required()->envname("OLSB_CONFIG");
  run->add_option("--slots", rf.slots)->envname("OLSB_SLOTS");
  run->add_option("--seeds", rf.seeds, "seed count, or a comma list")->envname("OLSB_SEEDS");
  run->add_option("--k", rf.k)->delimiter(',')->envname("OLSB_K");
  run->add_option("--lambda", rf.lambda)->delimiter(',')->envname("OLSB_LAMBDA");
  run->add_option("--algorithm", rf.algorithm)->delimiter(',')->envname("OLSB_ALGORITHM");
  run->add_option("--workers", rf.workers)->envname("OLSB_WORKERS")->check(CLI::PositiveNumber);
  run->add_option("--out", rf.out)->envname("OLSB_OUT");
  run->add_option("--stride", rf.stride)->envname("OLSB_STRIDE");
  run->add_option("--ack-mode", rf.ack_mode)->envname("OLSB_ACK_MODE");
  run->add_flag("--decision-log", rf.decision_log, "write per-decision index values")->envname("OLSB_DECISION_LOG");

  std::string run_dir;
  std::optional<double> bound_n;
  auto* bound = app.add_subcommand("bound", "regret bound report for a finished olsb run");
  bound->add_option("--run", run_dir, "run artifact directory")->required();
  bound->add_option("--n", bound_n, "horizon (default: the run's)");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("--config", validate_path)->required()->envname("OLSB_CONFIG");

  ReproduceOptions ro;
  ro.config_dir = "configs";
  ro.out = "runs/suite";
  auto* reproduce = app.add_subcommand("reproduce", "all three load regimes with every algorithm");
  reproduce->add_option("--config-dir", ro.config_dir)->envname("OLSB_CONFIG_DIR");
  reproduce->add_option("--out", ro.out)->envname("OLSB_OUT");
  reproduce->add_option("--workers", ro.workers)->envname("OLSB_WORKERS")->check(CLI::PositiveNumber);
  reproduce->add_option("--slots", ro.slots)->envname("OLSB_SLOTS");
  reproduce->add_option("--seeds", ro.seeds, "seed count")->envname("OLSB_SEEDS");

  std::string topo_file, topo_note, topo_out;
  int rows = 8, cols = 8;
  bool forward = false;
  std::vector<std::string> extras;
  auto* topology = app.add_subcommand("topology", "inspect a topology file or emit a grid");
  topology->add_option("--file", topo_file, "print size and content hash of this file");
  topology->add_option("--rows", rows);
  topology->add_option("--cols", cols);
  topology->add_flag("--forward", forward, "rightward and downward links only");
  topology->add_option("--extra", extras, "extra directed link r,c:r,c (repeatable)");
  topology->add_option("--note", topo_note);
  topology->add_option("--out", topo_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) return cmd_run(rf);
    if (*bound) return cmd_bound(run_dir, bound_n);
    if (*validate) return cmd_validate(validate_path);
    if (*reproduce) {
      reproduce_paper_suite(ro);
      std::cout << "suite written to " << ro.out.string() << "\n";
      return 0;
    }
    if (*topology) return cmd_topology(topo_file, rows, cols, forward, extras, topo_note, topo_out);
  } catch (const MissingConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
