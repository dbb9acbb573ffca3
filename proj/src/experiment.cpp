#include "olsb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace olsb {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json path_json(const Path& p, const Graph& g) {
  json nodes = json::array();
  for (NodeId v : path_nodes(p, g)) {
    const Coord c = g.coord_of(v);
    nodes.push_back({c.row, c.col});
  }
  return {{"id", p.id}, {"nodes", nodes}};
}

}  // namespace

std::vector<RunPoint> expand_points(const ExperimentSpec& spec) {
  std::vector<RunPoint> out;
  for (Algorithm a : spec.algorithms) {
    const bool uses_k = a == Algorithm::kOlsb;
    const std::vector<double> ks = uses_k ? spec.K : std::vector<double>{spec.K.front()};
    for (double rate : spec.arrival_rates) {
      for (double k : ks) {
        for (std::uint64_t seed : spec.seeds) {
          RunPoint p;
          p.config = spec.base;
          p.config.algorithm = a;
          p.config.K = k;
          p.config.seed = seed;
          for (auto& f : p.config.flows) f.rate = rate;
          p.label = std::string(to_string(a)) + (uses_k ? "_K" + num(k) : "") + "_lam" + num(rate) + "_seed" +
                    std::to_string(seed);
          p.point = spec.resolved;
          p.point["K"] = k;
          p.point["arrival_rate"] = rate;
          p.point["algorithm"] = std::string(to_string(a));
          p.point["seeds"] = json::array({seed});
          p.point["name"] = spec.name;
          out.push_back(std::move(p));
        }
      }
    }
  }
  return out;
}

void write_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << text;
    if (!os.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

json manifest_json(const ExperimentSpec& spec, const RunPoint& point, const RunArtifact& art) {
  json j;
  j["label"] = point.label;
  j["config"] = point.point;
  j["config_sha1"] = config_hash(point.point);
  j["topology_sha1"] = spec.topology_sha1;
  j["seed"] = point.config.seed;
  json sp = json::array();
  const Graph& g = *point.config.graph;
  for (const auto& f : art.flows) {
    json paths = json::array();
    for (const auto& p : f.spanner) paths.push_back(path_json(p, g));
    sp.push_back({{"flow", f.spec.id},
                  {"enumerated", f.enumerated},
                  {"coefficient_bound", f.spanner_bound},
                  {"paths", paths}});
  }
  j["spanners"] = sp;
  return j;
}

namespace {

json bounds_json(const std::vector<BoundReport>& reports, double n) {
  json flows = json::array();
  double printed = 0.0, clamped = 0.0;
  for (const auto& b : reports) {
    flows.push_back(to_json(b));
    printed += b.bound_as_printed;
    clamped += b.bound_clamped;
  }
  return {{"n", n}, {"flows", flows}, {"total_as_printed", printed}, {"total_clamped", clamped}};
}

}  // namespace

void write_point(const fs::path& dir, const ExperimentSpec& spec, const RunPoint& point, const RunArtifact& art) {
  fs::create_directories(dir);
  const double n = static_cast<double>(art.config.horizon);
  write_atomic(dir / "metrics.csv", metrics_csv(art));
  write_atomic(dir / "manifest.json", manifest_json(spec, point, art).dump(2) + "\n");
  write_atomic(dir / "summary.json", summary_json(art, summarize(art)).dump(2) + "\n");
  if (art.config.algorithm == Algorithm::kOlsb) {
    write_atomic(dir / "bounds.json", bounds_json(run_bounds(art, n), n).dump(2) + "\n");
  }
  if (art.config.decision_log) write_atomic(dir / "decisions.csv", decision_log_csv(art));
}

std::vector<PointOutcome> run_sweep(const ExperimentSpec& spec, const SweepOptions& opts, const PointSink& sink) {
  const auto points = expand_points(spec);
  std::vector<PointOutcome> outcomes(points.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr first_error;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      {
        std::lock_guard lock(mu);
        if (first_error) return;
      }
      try {
        const RunPoint& p = points[i];
        RunArtifact art = run(p.config);
        PointOutcome& o = outcomes[i];
        o.point = p;
        o.summary = summarize(art);
        o.invariants = art.invariants;
        if (p.config.algorithm == Algorithm::kOlsb) o.bounds = run_bounds(art, static_cast<double>(p.config.horizon));
        if (!opts.out.empty()) {
          o.dir = opts.out / p.label;
          write_point(o.dir, spec, p, art);
        }
        if (sink) {
          std::lock_guard lock(mu);
          sink(p, art);
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  const std::size_t n_workers = std::max<std::size_t>(1, std::min(opts.workers, points.size()));
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
  }
  if (first_error) std::rethrow_exception(first_error);

  if (!opts.out.empty()) {
    const auto rows = aggregate(outcomes);
    write_atomic(opts.out / "aggregate.csv", aggregate_csv(rows));
    json seeds = json::array();
    for (auto s : spec.seeds) seeds.push_back(s);
    json points_j = json::array();
    for (const auto& o : outcomes) points_j.push_back(o.point.label);
    write_atomic(opts.out / "sweep.json",
                 json{{"name", spec.name}, {"seeds", seeds}, {"points", points_j}, {"config_sha1", config_hash(spec.resolved)}}
                         .dump(2) +
                     "\n");
  }
  return outcomes;
}

std::vector<AggregateRow> aggregate(const std::vector<PointOutcome>& outcomes) {
  struct Acc {
    AggregateRow row;
    std::vector<double> delay, queue, regret, ssq, cost;
  };
  std::vector<Acc> groups;
  for (const auto& o : outcomes) {
    const auto& c = o.point.config;
    const double rate = c.flows.empty() ? 0.0 : c.flows.front().rate;
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Acc& a) {
      return a.row.algorithm == c.algorithm && a.row.K == c.K && a.row.arrival_rate == rate;
    });
    if (it == groups.end()) {
      groups.push_back({});
      it = groups.end() - 1;
      it->row.algorithm = c.algorithm;
      it->row.K = c.K;
      it->row.arrival_rate = rate;
    }
    ++it->row.seeds;
    if (o.summary.avg_delay_us) it->delay.push_back(*o.summary.avg_delay_us);
    if (o.summary.avg_cost) it->cost.push_back(*o.summary.avg_cost);
    it->queue.push_back(o.summary.avg_queue_len);
    it->regret.push_back(o.summary.regret_final);
    it->ssq.push_back(o.summary.source_shortest_queue);
  }
  std::vector<AggregateRow> out;
  for (auto& g : groups) {
    g.row.delay_us = mean_stderr(g.delay);
    g.row.queue_len = mean_stderr(g.queue);
    g.row.regret = mean_stderr(g.regret);
    g.row.source_shortest_queue = mean_stderr(g.ssq);
    g.row.cost = mean_stderr(g.cost);
    out.push_back(g.row);
  }
  return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::ostringstream os;
  os << "algorithm,K,arrival_rate,seeds,delay_us_mean,delay_us_stderr,queue_len_mean,queue_len_stderr,"
        "regret_mean,regret_stderr,source_shortest_queue_mean,source_shortest_queue_stderr,cost_mean,cost_stderr\n";
  for (const auto& r : rows) {
    const bool olsb = r.algorithm == Algorithm::kOlsb;
    os << to_string(r.algorithm) << ',' << (olsb ? fmt(r.K) : std::string("NA")) << ',' << fmt(r.arrival_rate) << ','
       << r.seeds << ',' << fmt(r.delay_us.mean) << ',' << fmt(r.delay_us.stderr_) << ',' << fmt(r.queue_len.mean)
       << ',' << fmt(r.queue_len.stderr_) << ',';
    if (olsb) {
      os << fmt(r.regret.mean) << ',' << fmt(r.regret.stderr_) << ',';
    } else {
      os << "NA,NA,";
    }
    os << fmt(r.source_shortest_queue.mean) << ',' << fmt(r.source_shortest_queue.stderr_) << ','
       << fmt(r.cost.mean) << ',' << fmt(r.cost.stderr_) << '\n';
  }
  return os.str();
}

std::vector<BoundReport> bounds_from_summary(const json& summary, double n) {
  const CostLevels levels(summary.at("levels").get<std::vector<double>>());
  const double k_eff = summary.at("K").get<double>() * summary.at("objective_scale").get<double>();
  std::vector<BoundReport> out;
  for (const auto& f : summary.at("flows")) {
    BoundInputs in;
    in.K = k_eff;
    in.mu = f.at("true_means").get<std::vector<double>>();
    const auto eta = f.at("eta").get<std::vector<double>>();
    for (double mu : in.mu) {
      const auto m = static_cast<std::size_t>(levels.level_of(mu));
      in.eta.push_back(m < eta.size() ? eta[m] : 0.0);
    }
    out.push_back(theorem1_bound(in, n));
  }
  return out;
}

namespace {

// Seed-averaged metric series for one algorithm/K line of a figure.
struct Series {
  std::vector<std::int64_t> slots;
  std::vector<double> regret_over_ln, queue, delay;
  std::vector<std::size_t> regret_n, delay_n;
  std::size_t runs = 0;

  void add(const RunArtifact& art) {
    const auto& rows = art.rows;
    if (slots.empty()) {
      for (const auto& r : rows) slots.push_back(r.slot);
      regret_over_ln.assign(rows.size(), 0.0);
      queue.assign(rows.size(), 0.0);
      delay.assign(rows.size(), 0.0);
      regret_n.assign(rows.size(), 0);
      delay_n.assign(rows.size(), 0);
    }
    const std::size_t n = std::min(rows.size(), slots.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].slot >= 2) {
        regret_over_ln[i] += rows[i].regret_cum / std::log(static_cast<double>(rows[i].slot));
        ++regret_n[i];
      }
      queue[i] += rows[i].avg_queue_len;
      if (rows[i].avg_delay_us) {
        delay[i] += *rows[i].avg_delay_us;
        ++delay_n[i];
      }
    }
    ++runs;
  }
};

std::string series_name(const SimConfig& c) {
  return c.algorithm == Algorithm::kOlsb ? "olsb_K" + num(c.K) : std::string(to_string(c.algorithm));
}

std::string cell(double sum, std::size_t n) { return n ? fmt(sum / static_cast<double>(n)) : std::string("NA"); }

}  // namespace

void reproduce_paper_suite(const ReproduceOptions& opts) {
  struct Regime {
    const char* name;
    const char* figure;
  };
  const Regime regimes[] = {{"light", "series_light"}, {"moderate", "series_moderate"}, {"high", "series_high"}};
  for (const auto& rg : regimes) {
    const fs::path cfg = opts.config_dir / (std::string(rg.name) + ".json");
    json j = read_json_file(cfg);
    if (opts.slots > 0) j["slots"] = opts.slots;
    if (opts.seeds > 0) j["seeds"] = {{"base", 1}, {"count", opts.seeds}};
    j["algorithm"] = {"olsb", "backpressure", "aspr", "ucb1"};
    ExperimentSpec spec = parse_experiment(j, cfg.parent_path());

    std::map<std::string, Series> series;
    SweepOptions so;
    so.workers = opts.workers;
    so.out = opts.out / rg.name;
    run_sweep(spec, so, [&](const RunPoint& p, const RunArtifact& art) {
      const std::string name = series_name(p.config);
      series[name].add(art);
    });
    // fixed column order independent of completion order
    std::vector<std::string> cols;
    for (const auto& p : expand_points(spec)) {
      const auto name = series_name(p.config);
      if (std::find(cols.begin(), cols.end(), name) == cols.end()) cols.push_back(name);
    }

    std::ostringstream os;
    os << "slot";
    for (const auto& c : cols) os << ',' << c << "_delay_us," << c << "_queue_len";
    os << '\n';
    const auto& ref = series[cols.front()];
    for (std::size_t i = 0; i < ref.slots.size(); ++i) {
      os << ref.slots[i];
      for (const auto& c : cols) {
        const auto& s = series[c];
        os << ',' << cell(s.delay[i], s.delay_n[i]) << ',' << cell(s.queue[i], s.runs);
      }
      os << '\n';
    }
    write_atomic(opts.out / (std::string(rg.figure) + ".csv"), os.str());

    if (std::string(rg.name) == "moderate") {
      std::vector<std::string> olsb_cols;
      for (const auto& c : cols) {
        if (c.rfind("olsb_", 0) == 0) olsb_cols.push_back(c);
      }
      std::ostringstream rs;
      rs << "slot";
      for (const auto& c : olsb_cols) rs << ',' << c << "_regret_over_ln_t";
      rs << '\n';
      const auto& r0 = series[olsb_cols.front()];
      for (std::size_t i = 0; i < r0.slots.size(); ++i) {
        rs << r0.slots[i];
        for (const auto& c : olsb_cols) rs << ',' << cell(series[c].regret_over_ln[i], series[c].regret_n[i]);
        rs << '\n';
      }
      write_atomic(opts.out / "regret_curve.csv", rs.str());
    }
  }
}

}  // namespace olsb
