#include "olsb/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace olsb {

double regret_increment(double realized_cost, std::span<const std::uint32_t> source_queues,
                        std::span<const double> means, const CostLevels& levels, double K, double scale) {
  const Selection g = genie_select(means, source_queues, levels, K, scale);
  const double mine = K * scale * realized_cost +
                      static_cast<double>(source_queues[static_cast<std::size_t>(levels.level_of(realized_cost))]);
  return mine - g.value;
}

BoundReport theorem1_bound(const BoundInputs& in, double n) {
  if (in.mu.size() != in.eta.size()) throw std::invalid_argument("theorem1_bound: mu and eta sizes differ");
  BoundReport r;
  r.L = in.mu.size();
  r.K = in.K;
  if (r.L <= 1) {
    r.psi.assign(r.L, 0.0);
    r.delta_min.assign(r.L, 0.0);
    return r;
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> obj(r.L);
  for (std::size_t i = 0; i < r.L; ++i) obj[i] = in.K * in.mu[i] + in.eta[i];
  double log_term = 0.0, log_term_c = 0.0, psi_sum = 0.0, psi_sum_c = 0.0;
  for (std::size_t i = 0; i < r.L; ++i) {
    double min_mu = inf, min_eta = inf, dmin = inf;
    for (std::size_t j = 0; j < r.L; ++j) {
      if (j == i) continue;
      min_mu = std::min(min_mu, in.mu[j]);
      min_eta = std::min(min_eta, in.eta[j]);
      dmin = std::min(dmin, obj[j] - obj[i]);
    }
    const double psi = obj[i] - (in.K * min_mu + min_eta);
    r.psi.push_back(psi);
    r.delta_min.push_back(dmin);
    const double psi_c = std::max(psi, 0.0);
    psi_sum += psi;
    psi_sum_c += psi_c;
    if (dmin != 0.0) {
      log_term += psi * std::log(n) / (dmin * dmin);
      log_term_c += psi_c * std::log(n) / (dmin * dmin);
    }
  }
  const double tail = static_cast<double>(r.L - 1) * (1.0 + std::numbers::pi * std::numbers::pi / 3.0);
  r.bound_as_printed = 8.0 * log_term + tail * psi_sum;
  r.bound_clamped = 8.0 * log_term_c + tail * psi_sum_c;
  return r;
}

BoundInputs bound_inputs(const FlowReport& flow, const CostLevels& levels, double K_effective) {
  BoundInputs in;
  in.K = K_effective;
  in.mu = flow.true_means;
  for (double mu : flow.true_means) {
    const auto m = static_cast<std::size_t>(levels.level_of(mu));
    in.eta.push_back(m < flow.eta.size() ? flow.eta[m] : 0.0);
  }
  return in;
}

std::vector<BoundReport> run_bounds(const RunArtifact& art, double n) {
  std::vector<BoundReport> out;
  const double k_eff = art.config.K * art.config.objective_scale;
  for (const auto& f : art.flows) out.push_back(theorem1_bound(bound_inputs(f, art.config.levels, k_eff), n));
  return out;
}

nlohmann::json to_json(const BoundReport& b) {
  return {{"L", b.L},
          {"K", b.K},
          {"psi", b.psi},
          {"delta_min", b.delta_min},
          {"bound_as_printed", b.bound_as_printed},
          {"bound_clamped", b.bound_clamped}};
}

RunSummary summarize(const RunArtifact& art) {
  RunSummary s;
  s.injected = art.injected;
  s.delivered = art.delivered;
  s.in_system = art.in_system;
  if (art.delivered > 0) {
    s.avg_delay_us = art.delay_sum_slots / static_cast<double>(art.delivered) * kSlotMicroseconds;
    s.avg_cost = art.delivered_cost_sum / static_cast<double>(art.delivered);
  }
  double q = 0.0;
  for (float v : art.queue_avg) q += v;
  s.avg_queue_len = art.queue_avg.empty() ? 0.0 : q / static_cast<double>(art.queue_avg.size());
  s.regret_final = art.regret_cum.empty() ? 0.0 : art.regret_cum.back();
  double sq = 0.0;
  for (const auto& f : art.flows) sq += f.source_shortest_queue;
  s.source_shortest_queue = art.flows.empty() ? 0.0 : sq / static_cast<double>(art.flows.size());
  return s;
}

nlohmann::json summary_json(const RunArtifact& art, const RunSummary& s) {
  using nlohmann::json;
  const auto& c = art.config;
  json j;
  j["algorithm"] = to_string(c.algorithm);
  j["K"] = c.K;
  j["objective_scale"] = c.objective_scale;
  j["arrival_rate"] = c.flows.empty() ? 0.0 : c.flows.front().rate;
  j["seed"] = c.seed;
  j["slots"] = c.horizon;
  j["avg_delay_us"] = s.avg_delay_us ? json(*s.avg_delay_us) : json(nullptr);
  j["avg_queue_len"] = s.avg_queue_len;
  j["avg_cost"] = s.avg_cost ? json(*s.avg_cost) : json(nullptr);
  j["injected"] = s.injected;
  j["delivered"] = s.delivered;
  j["in_system"] = s.in_system;
  j["regret_final"] = s.regret_final;
  j["source_shortest_queue"] = s.source_shortest_queue;
  j["levels"] = c.levels.values();
  j["eta_estimate"] = "time-average of the source queue over the second half of the run";
  json flows = json::array();
  for (const auto& f : art.flows) {
    json jf;
    jf["id"] = f.spec.id;
    jf["L"] = f.spanner.size();
    jf["enumerated"] = f.enumerated;
    jf["true_means"] = f.true_means;
    jf["eta"] = f.eta;
    jf["shortest_level"] = f.shortest_level;
    jf["source_shortest_queue"] = f.source_shortest_queue;
    jf["decisions"] = f.decisions;
    jf["genie_matches"] = f.genie_matches;
    json est = json::array(), cnt = json::array();
    for (const auto& st : f.final_stats) {
      est.push_back(st.mean);
      cnt.push_back(st.count);
    }
    jf["estimates"] = est;
    jf["counts"] = cnt;
    flows.push_back(jf);
  }
  j["flows"] = flows;
  const auto& inv = art.invariants;
  j["invariants"] = {{"conservation", inv.conservation},
                     {"monotonicity", inv.monotonicity},
                     {"compliance", inv.compliance},
                     {"compliance_checked", inv.compliance_checked},
                     {"max_compliance_excess", inv.max_compliance_excess},
                     {"feasibility", inv.feasibility}};
  return j;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string join_paths(const std::vector<std::int64_t>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ';';
    s += ids[i] < 0 ? std::string("-") : std::to_string(ids[i]);
  }
  return s;
}

}  // namespace

std::string metrics_csv(const RunArtifact& art) {
  const bool has_regret = art.config.algorithm == Algorithm::kOlsb;
  std::ostringstream os;
  os << "slot,regret_inc,regret_cum,regret_over_ln_t,avg_queue_len,deliveries,avg_delay_us,chosen_path,genie_path\n";
  for (const auto& r : art.rows) {
    os << r.slot << ',';
    if (has_regret) {
      os << fmt(r.regret_inc) << ',' << fmt(r.regret_cum) << ',';
      if (r.slot >= 2) {
        os << fmt(r.regret_cum / std::log(static_cast<double>(r.slot)));
      } else {
        os << "NA";
      }
    } else {
      os << "NA,NA,NA";
    }
    os << ',' << fmt(r.avg_queue_len) << ',' << r.deliveries << ',';
    os << (r.avg_delay_us ? fmt(*r.avg_delay_us) : std::string("NA")) << ',';
    os << join_paths(r.chosen_path) << ',' << join_paths(r.genie_path) << '\n';
  }
  return os.str();
}

std::string decision_log_csv(const RunArtifact& art) {
  std::ostringstream os;
  os << "slot,flow,chosen_path,index_values\n";
  for (const auto& d : art.decision_log) {
    os << d.slot << ',' << d.flow << ',' << d.chosen << ',';
    for (std::size_t i = 0; i < d.index_values.size(); ++i) {
      if (i) os << ';';
      os << fmt(d.index_values[i]);
    }
    os << '\n';
  }
  return os.str();
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("linear_fit: need >= 3 paired points");
  LinearFit f;
  f.n = x.size();
  const double n = static_cast<double>(f.n);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < f.n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < f.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < f.n; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    f.rss += e * e;
  }
  f.r2 = syy > 0 ? 1.0 - f.rss / syy : 1.0;
  f.aic = n * std::log(std::max(f.rss, 1e-300) / n) + 4.0;
  return f;
}

MeanStderr mean_stderr(std::span<const double> v) {
  MeanStderr r;
  if (v.empty()) return r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return r;
}

double window_mean(std::span<const float> series, std::size_t begin, std::size_t end) {
  end = std::min(end, series.size());
  if (begin >= end) return 0.0;
  double s = 0;
  for (std::size_t i = begin; i < end; ++i) s += series[i];
  return s / static_cast<double>(end - begin);
}

}  // namespace olsb
