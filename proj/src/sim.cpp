#include "olsb/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "olsb/backpressure.hpp"
#include "olsb/spanner.hpp"

namespace olsb {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kOlsb: return "olsb";
    case Algorithm::kBackpressure: return "backpressure";
    case Algorithm::kAspr: return "aspr";
    case Algorithm::kUcb1: return "ucb1";
  }
  return "?";
}

std::string_view to_string(AckMode a) { return a == AckMode::kInstant ? "instant" : "per_hop"; }
std::string_view to_string(GenieSet g) { return g == GenieSet::kSpanner ? "spanner" : "all_paths"; }

Algorithm parse_algorithm(std::string_view s) {
  if (s == "olsb") return Algorithm::kOlsb;
  if (s == "backpressure") return Algorithm::kBackpressure;
  if (s == "aspr") return Algorithm::kAspr;
  if (s == "ucb1") return Algorithm::kUcb1;
  throw ConfigError("unknown algorithm '" + std::string(s) + "' (olsb, backpressure, aspr, ucb1)");
}

AckMode parse_ack_mode(std::string_view s) {
  if (s == "instant") return AckMode::kInstant;
  if (s == "per_hop") return AckMode::kPerHop;
  throw ConfigError("unknown ack mode '" + std::string(s) + "' (instant, per_hop)");
}

GenieSet parse_genie_set(std::string_view s) {
  if (s == "spanner") return GenieSet::kSpanner;
  if (s == "all_paths") return GenieSet::kAllPaths;
  throw ConfigError("unknown genie set '" + std::string(s) + "' (spanner, all_paths)");
}

void SimConfig::validate() const {
  if (!graph) throw ConfigError("topology: missing graph");
  if (flows.empty()) throw ConfigError("flows: at least one flow required");
  if (hop_slack && *hop_slack < 0) throw ConfigError("hop_slack: must be >= 0");
  if (link_dists.size() != graph->link_count()) {
    throw ConfigError("links: expected " + std::to_string(graph->link_count()) + " distributions, got " +
                      std::to_string(link_dists.size()));
  }
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const auto& f = flows[i];
    const std::string where = "flows[" + std::to_string(i) + "]";
    if (index_of(f.src) >= graph->node_count() || index_of(f.dst) >= graph->node_count()) {
      throw ConfigError(where + ": endpoint out of range");
    }
    if (f.src == f.dst) throw ConfigError(where + ": source equals destination");
    if (!(f.rate >= 0.0 && f.rate <= 100.0)) throw ConfigError(where + ".rate: must be in [0, 100]");
    if (!graph->reachable_to(f.dst)[index_of(f.src)]) throw ConfigError(where + ": destination unreachable");
    for (std::size_t j = 0; j < i; ++j) {
      if (flows[j].id == f.id) throw ConfigError(where + ".id: duplicate flow id");
    }
  }
  if (!(K > 0.0)) throw ConfigError("K: must be > 0");
  if (!(objective_scale > 0.0)) throw ConfigError("objective_scale: must be > 0");
  if (horizon < 0) throw ConfigError("slots: must be >= 0");
  if (cap < 1) throw ConfigError("cap: must be >= 1");
  if (link_cap < 1) throw ConfigError("link_cap: must be >= 1");
  if (stride < 1) throw ConfigError("stride: must be >= 1");
  if (!(spanner_C >= 1.0)) throw ConfigError("spanner_C: must be >= 1");
  if (levels.count() > 255) throw ConfigError("levels: at most 255 queue levels");
}

std::uint32_t poisson_draw(double lambda, CounterStream& rng) {
  if (lambda <= 0.0) return 0;
  const double u = rng.uniform();
  double p = std::exp(-lambda);
  double cdf = p;
  std::uint32_t k = 0;
  while (u >= cdf && k < 10000) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cdf += p;
    if (p == 0.0 && cdf < u) break;  // numerical tail
  }
  return k;
}

std::uint32_t arrivals(const FlowSpec& flow, std::int64_t t, std::uint64_t seed) {
  CounterStream rng(seed, RngDomain::kArrivals, flow.id, static_cast<std::uint64_t>(t));
  return poisson_draw(flow.rate, rng);
}

namespace {

struct Observation {
  std::uint32_t learner = 0;
  std::uint32_t path = 0;
  double cost = 0.0;
  std::int64_t slot = 0;  // slot whose weights were observed
};

struct SuffixRef {
  std::uint32_t learner = 0;
  std::uint32_t path = 0;
  std::size_t offset = 0;  // links skipped from the source path
};

struct FlowState {
  std::size_t learner = 0;
  std::size_t dest_index = 0;
  std::vector<Path> enumerated;
  std::vector<double> genie_means;  // over the genie comparison set
  std::vector<std::uint32_t> genie_ids;
  std::vector<std::vector<SuffixRef>> suffixes;  // per spanner path
  std::size_t route_offset = 0;
  std::vector<double> eta_acc;
  double shortest_acc = 0.0;
  std::int64_t window_chosen = -1;
  std::int64_t window_genie = -1;
};

struct Staged {
  Packet pkt;
  NodeId node{};
  int level = 0;
};

class Simulator {
 public:
  explicit Simulator(const SimConfig& cfg)
      : cfg_(cfg),
        g_(*cfg.graph),
        n_(g_.node_count()),
        model_(cfg.link_dists, cfg.seed),
        dests_(collect_destinations(cfg)),
        bank_(n_, dests_, cfg.algorithm == Algorithm::kOlsb ? cfg.levels.count() : 1),
        links_(n_, g_.link_count()) {
    art_.config = cfg;
    max_hops_ = cfg.max_hops ? cfg.max_hops : n_ - 1;
    learner_at_.assign(n_ * dests_.size(), -1);
    ctx_.graph = &g_;
    ctx_.levels = &cfg_.levels;
    for (NodeId d : dests_) {
      ctx_.can_reach.push_back(g_.reachable_to(d));
      hop_dist_.push_back(g_.hop_distances_to(d));
    }
    ctx_.budget = cfg.algorithm == Algorithm::kOlsb;
    ctx_.min_source_level = ctx_.budget ? 1 : 0;
    ctx_.weight_norm = static_cast<double>(n_);
    w0_ = model_.sample_slot(0).weights;
    w_.assign(g_.link_count(), 0.0);
    link_est_.assign(g_.link_count(), PathStats{});
    setup_flows();
  }

  RunArtifact run() {
    const std::int64_t n = cfg_.horizon;
    art_.regret_cum.reserve(static_cast<std::size_t>(n));
    art_.queue_avg.reserve(static_cast<std::size_t>(n));
    const std::size_t ring = max_hops_ + 2;
    pending_.assign(ring, {});
    for (std::int64_t t = 1; t <= n; ++t) step(t);
    finish();
    return std::move(art_);
  }

 private:
  static std::vector<NodeId> collect_destinations(const SimConfig& cfg) {
    std::vector<NodeId> d;
    for (const auto& f : cfg.flows) d.push_back(f.dst);
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    return d;
  }

  bool olsb() const { return cfg_.algorithm == Algorithm::kOlsb; }
  bool pinned() const { return cfg_.algorithm == Algorithm::kAspr || cfg_.algorithm == Algorithm::kUcb1; }
  double norm_cost(const Path& p, std::span<const double> w) const { return path_cost(p, w, n_); }

  // Learner for (v, d); built on first use with slot-0 probe observations.
  std::size_t learner_for(NodeId v, std::size_t di) {
    auto& slot = learner_at_[index_of(v) * dests_.size() + di];
    if (slot >= 0) return static_cast<std::size_t>(slot);
    const NodeId d = dests_[di];
    auto paths = enumerate_paths(g_, v, d, hop_limit(v, di), cfg_.max_paths);
    if (paths.empty()) {
      throw ConfigError("no path from " + node_name(v) + " to " + node_name(d) + " within max_hops");
    }
    SpannerOptions so;
    so.approx_C = cfg_.spanner_C;
    auto sp = build_spanner(paths, so);
    PathLearner learner(std::move(sp.base_paths));
    std::vector<double> obs;
    for (const auto& p : learner.paths()) obs.push_back(cfg_.oracle_estimates ? path_mean(p, model_, n_) : norm_cost(p, w0_));
    if (cfg_.oracle_estimates) {
      learner.pin_means(obs);
    } else {
      learner.initialize(obs, 0);
    }
    learners_.push_back(std::move(learner));
    spanner_bounds_.push_back(sp.coefficient_bound);
    enumerated_counts_.push_back(paths.size());
    best_cache_.push_back(-1);
    slot = static_cast<std::int32_t>(learners_.size() - 1);
    return learners_.size() - 1;
  }

  std::size_t hop_limit(NodeId v, std::size_t di) const {
    const int dist = hop_dist_[di][index_of(v)];
    if (!cfg_.hop_slack || dist < 0) return max_hops_;
    return std::min(max_hops_, static_cast<std::size_t>(dist + *cfg_.hop_slack));
  }

  std::string node_name(NodeId v) const {
    return g_.has_coords() ? to_string(g_.coord_of(v)) : std::to_string(index_of(v));
  }

  void setup_flows() {
    flows_.resize(cfg_.flows.size());
    art_.flows.resize(cfg_.flows.size());
    for (std::size_t f = 0; f < cfg_.flows.size(); ++f) {
      const auto& spec = cfg_.flows[f];
      auto& fs = flows_[f];
      auto& rep = art_.flows[f];
      fs.dest_index = static_cast<std::size_t>(bank_.dest_index(spec.dst));
      fs.learner = learner_for(spec.src, fs.dest_index);
      fs.enumerated = enumerate_paths(g_, spec.src, spec.dst, hop_limit(spec.src, fs.dest_index), cfg_.max_paths);
      const auto& L = learners_[fs.learner];
      rep.spec = spec;
      rep.enumerated = fs.enumerated.size();
      rep.spanner = L.paths();
      rep.spanner_bound = spanner_bounds_[fs.learner];
      for (const auto& p : L.paths()) rep.true_means.push_back(path_mean(p, model_, n_));
      rep.shortest = static_cast<std::size_t>(
          std::min_element(rep.true_means.begin(), rep.true_means.end()) - rep.true_means.begin());
      rep.shortest_level = olsb() ? cfg_.levels.level_of(rep.true_means[rep.shortest]) : 0;
      rep.concentration_ok.assign(L.size(), 0);
      rep.eta.assign(bank_.level_count(), 0.0);
      fs.eta_acc.assign(bank_.level_count(), 0.0);
      if (cfg_.genie_set == GenieSet::kSpanner) {
        fs.genie_means = rep.true_means;
        for (const auto& p : L.paths()) fs.genie_ids.push_back(p.id);
      } else {
        for (const auto& p : fs.enumerated) {
          fs.genie_means.push_back(path_mean(p, model_, n_));
          fs.genie_ids.push_back(p.id);
        }
      }
    }
    if (olsb()) {
      // sub-path learners along every source spanner path
      for (auto& fs : flows_) {
        const auto paths = learners_[fs.learner].paths();  // copy: learner_for may grow learners_
        fs.suffixes.assign(paths.size(), {});
        for (std::size_t i = 0; i < paths.size(); ++i) {
          const auto nodes = path_nodes(paths[i], g_);
          for (std::size_t k = 1; k + 1 < nodes.size(); ++k) {
            const std::size_t l = learner_for(nodes[k], fs.dest_index);
            std::span<const LinkId> tail(paths[i].links.data() + k, paths[i].links.size() - k);
            if (auto idx = learners_[l].find_by_links(tail)) {
              fs.suffixes[i].push_back({static_cast<std::uint32_t>(l), static_cast<std::uint32_t>(*idx), k});
            }
          }
        }
      }
    }
    // Path storage lives on the heap inside each learner, so these pointers
    // survive growth of learners_.
    for (auto& fs : flows_) {
      fs.route_offset = routes_.size();
      for (const auto& p : learners_[fs.learner].paths()) routes_.push_back(&p);
    }
    if (cfg_.algorithm == Algorithm::kAspr) {
      // the initial probes also seed the per-link estimates
      for (auto& fs : flows_) {
        for (const auto& p : learners_[fs.learner].paths()) {
          for (LinkId e : p.links) {
            link_est_[index_of(e)].add(cfg_.oracle_estimates ? model_.true_mean(e) : w0_[index_of(e)], 0);
          }
        }
      }
    }
    art_.learner_count = learners_.size();
  }

  const Path& best_path(std::size_t l) {
    if (best_cache_[l] < 0) best_cache_[l] = static_cast<std::int32_t>(learners_[l].best_estimate());
    return learners_[l].paths()[static_cast<std::size_t>(best_cache_[l])];
  }

  void step(std::int64_t t) {
    model_.sample_into(t, w_);
    double regret_inc = 0.0;
    staged_.clear();

    // decisions on the pre-injection queue state
    for (std::size_t f = 0; f < flows_.size(); ++f) {
      const auto& spec = cfg_.flows[f];
      const std::uint32_t a = arrivals(spec, t, cfg_.seed);
      if (a == 0) continue;
      auto& fs = flows_[f];
      auto& rep = art_.flows[f];
      auto& L = learners_[fs.learner];
      int level = 0;
      std::int32_t route = -1;
      std::size_t chosen = 0;
      if (cfg_.algorithm == Algorithm::kBackpressure) {
        level = 0;
      } else if (olsb()) {
        const auto q = bank_.levels_at(index_of(spec.src), fs.dest_index);
        IndexParams ip{cfg_.K, cfg_.objective_scale, t, !cfg_.zero_bonus};
        std::vector<double> idx_values;
        const Selection sel = qucb_select(L.stats(), q, cfg_.levels, ip, cfg_.decision_log ? &idx_values : nullptr);
        chosen = sel.index;
        level = sel.level;
        const Path& p = L.paths()[chosen];
        const double c = norm_cost(p, w_);
        const Selection gen = genie_select(fs.genie_means, q, cfg_.levels, cfg_.K, cfg_.objective_scale);
        const double mine = cfg_.K * cfg_.objective_scale * c + static_cast<double>(q[static_cast<std::size_t>(cfg_.levels.level_of(c))]);
        regret_inc += mine - gen.value;
        ++rep.decisions;
        if (fs.genie_ids[gen.index] == p.id) ++rep.genie_matches;
        fs.window_chosen = p.id;
        fs.window_genie = fs.genie_ids[gen.index];
        if (cfg_.decision_log) art_.decision_log.push_back({t, spec.id, p.id, std::move(idx_values)});
        observe(fs, chosen, c, t);
      } else {
        std::vector<double> est(L.size());
        for (std::size_t i = 0; i < L.size(); ++i) {
          if (cfg_.algorithm == Algorithm::kAspr) {
            double s = 0.0;
            for (LinkId e : L.paths()[i].links) s += link_est_[index_of(e)].mean;
            est[i] = s / static_cast<double>(n_);
          } else {
            est[i] = L.stats()[i].mean;
          }
        }
        chosen = cfg_.zero_bonus ? static_cast<std::size_t>(std::min_element(est.begin(), est.end()) - est.begin())
                                 : ucb_cost_select(est, L.stats(), t);
        const Path& p = L.paths()[chosen];
        route = static_cast<std::int32_t>(fs.route_offset + chosen);
        fs.window_chosen = p.id;
        ++rep.decisions;
        observe(fs, chosen, norm_cost(p, w_), t);
      }
      for (std::uint32_t k = 0; k < a; ++k) {
        Packet pkt;
        pkt.uid = next_uid_++;
        pkt.flow = spec.id;
        pkt.dest = spec.dst;
        pkt.current = spec.src;
        pkt.level = level;
        pkt.source_level = level;
        pkt.injected_slot = t;
        pkt.route = route;
        staged_.push_back({std::move(pkt), spec.src, level});
      }
    }
    for (auto& s : staged_) {
      ++art_.injected;
      if (pinned()) {
        const Path& r = *routes_[static_cast<std::size_t>(s.pkt.route)];
        links_.enqueue(std::move(s.pkt), g_.link(r.links.front()));
      } else {
        const NodeId d = s.pkt.dest;
        bank_.enqueue(std::move(s.pkt), s.node, d, s.level);
      }
    }
    staged_.clear();

    // transmissions on the post-injection state; arrivals land next slot
    if (pinned()) {
      schedule_pinned(t);
    } else {
      schedule_hop_by_hop(t);
    }
    for (auto& s : staged_) {
      if (pinned()) {
        const Path& r = *routes_[static_cast<std::size_t>(s.pkt.route)];
        links_.enqueue(std::move(s.pkt), g_.link(r.links[s.pkt.hop_index]));
      } else {
        const NodeId d = s.pkt.dest;
        bank_.enqueue(std::move(s.pkt), s.node, d, s.level);
      }
    }
    staged_.clear();

    apply_observations(t);

    const std::uint64_t in_system = bank_.total() + links_.total();
    if (cfg_.check_invariants && art_.injected != in_system + art_.delivered) ++art_.invariants.conservation;
    regret_cum_ += regret_inc;
    art_.regret_cum.push_back(regret_cum_);
    const double qavg = static_cast<double>(in_system) / static_cast<double>(n_);
    art_.queue_avg.push_back(static_cast<float>(qavg));
    queue_time_sum_ += qavg;
    window_.regret += regret_inc;
    record_flow_queues(t);

    if (t % cfg_.stride == 0 || t == cfg_.horizon) emit_row(t, qavg);
  }

  void observe(FlowState& fs, std::size_t path, double cost, std::int64_t t) {
    if (cfg_.oracle_estimates) return;
    const std::size_t hops = learners_[fs.learner].paths()[path].hops();
    const std::int64_t due = cfg_.ack_mode == AckMode::kInstant ? t : t + static_cast<std::int64_t>(hops);
    auto& bucket = pending_[static_cast<std::size_t>(due) % pending_.size()];
    bucket.push_back({static_cast<std::uint32_t>(fs.learner), static_cast<std::uint32_t>(path), cost, t});
    if (olsb()) {
      const Path& p = learners_[fs.learner].paths()[path];
      for (const auto& s : fs.suffixes[path]) {
        double sum = 0.0;
        for (std::size_t k = s.offset; k < p.links.size(); ++k) sum += w_[index_of(p.links[k])];
        bucket.push_back({s.learner, s.path, sum / static_cast<double>(n_), t});
      }
    }
  }

  void apply_observations(std::int64_t t) {
    auto& bucket = pending_[static_cast<std::size_t>(t) % pending_.size()];
    for (const auto& o : bucket) {
      learners_[o.learner].record_at(o.path, o.cost, t);
      best_cache_[o.learner] = -1;
      if (cfg_.algorithm == Algorithm::kAspr) {
        // per-link samples of the forward traversal at the observed slot
        for (LinkId e : learners_[o.learner].paths()[o.path].links) {
          CounterStream rng(cfg_.seed, RngDomain::kLinkWeight, index_of(e), static_cast<std::uint64_t>(o.slot));
          link_est_[index_of(e)].add(model_.distribution(e).sample(rng), t);
        }
      }
    }
    bucket.clear();
  }

  void deliver(Packet& pkt, std::int64_t t) {
    ++art_.delivered;
    ++window_.deliveries;
    const double delay = static_cast<double>(t + 1 - pkt.injected_slot);
    art_.delay_sum_slots += delay;
    window_.delay_sum += delay;
    const double cost = pkt.cost_sum / static_cast<double>(n_);
    art_.delivered_cost_sum += cost;
    if (!cfg_.check_invariants) return;
    int prev = pkt.source_level;
    for (const auto& h : pkt.trace) {
      if (h.level > prev) {
        ++art_.invariants.monotonicity;
        break;
      }
      prev = h.level;
    }
    if (olsb()) {
      ++art_.invariants.compliance_checked;
      const double excess = cost - cfg_.levels[static_cast<std::size_t>(pkt.source_level)];
      if (excess > 1e-9) {
        ++art_.invariants.compliance;
        art_.invariants.max_compliance_excess = std::max(art_.invariants.max_compliance_excess, excess);
      }
    }
  }

  void traverse(Packet& pkt, const Link& l, int to_level, std::int64_t t) {
    const double w = w_[index_of(l.id)];
    pkt.trace.push_back({l.id, w, static_cast<std::uint8_t>(to_level)});
    pkt.cost_sum += w;
    ++pkt.hop_index;
    if (l.dst == pkt.dest) {
      deliver(pkt, t);
    } else {
      staged_.push_back({std::move(pkt), l.dst, to_level});
    }
  }

  void schedule_hop_by_hop(std::int64_t t) {
    bank_.refresh_snapshot(view_, t);
    link_budget_.assign(g_.link_count(), cfg_.link_cap);
    const std::size_t D = dests_.size();
    for (std::size_t vi = 0; vi < n_; ++vi) {
      const NodeId v = node_id(vi);
      if (bank_.node_total(v) == 0) continue;
      int sent = 0;
      std::vector<BackpressureDecision> moves;
      if (olsb()) {
        for (std::size_t di = 0; di < D && sent < cfg_.cap; ++di) {
          const NodeId d = dests_[di];
          while (sent < cfg_.cap) {
            const std::size_t at = (vi * D + di) * view_.n_levels;
            if (view_.lengths[at] == 0) break;
            const Path& sp = best_path(learner_for(v, di));
            auto dec = forward_level0(v, d, sp, view_);
            if (!dec || link_budget_[index_of(dec->link)] <= 0) break;
            --view_.lengths[at];
            --link_budget_[index_of(dec->link)];
            moves.push_back(*dec);
            ++sent;
          }
        }
      }
      if (sent < cfg_.cap) {
        auto bp = schedule_node(v, view_, ctx_, w_, cfg_.cap - sent, link_budget_);
        moves.insert(moves.end(), bp.begin(), bp.end());
      }
      for (const auto& mv : moves) {
        auto pkt = bank_.dequeue_head(v, mv.dest, mv.from_level);
        if (!pkt) throw std::logic_error("scheduler moved a packet from an empty queue");
        const Link& l = g_.link(mv.link);
        if (cfg_.check_invariants && ctx_.budget &&
            !cfg_.levels.transfer_allowed(mv.from_level, mv.to_level, w_[index_of(l.id)] / static_cast<double>(n_))) {
          ++art_.invariants.feasibility;
        }
        traverse(*pkt, l, mv.to_level, t);
      }
    }
  }

  void schedule_pinned(std::int64_t t) {
    link_budget_.assign(g_.link_count(), cfg_.link_cap);
    for (std::size_t vi = 0; vi < n_; ++vi) {
      const NodeId v = node_id(vi);
      if (links_.node_total(v) == 0) continue;
      for (int sent = 0; sent < cfg_.cap; ++sent) {
        const Link* best = nullptr;
        std::size_t best_len = 0;
        for (LinkId e : g_.out_links(v)) {
          const std::size_t len = links_.length(e);
          if (len > best_len && link_budget_[index_of(e)] > 0) {
            best_len = len;
            best = &g_.link(e);
          }
        }
        if (!best) break;
        auto pkt = links_.dequeue_head(*best);
        --link_budget_[index_of(best->id)];
        traverse(*pkt, *best, 0, t);
      }
    }
  }

  void record_flow_queues(std::int64_t t) {
    const bool second_half = 2 * t > cfg_.horizon;
    for (std::size_t f = 0; f < flows_.size(); ++f) {
      auto& fs = flows_[f];
      const auto& rep = art_.flows[f];
      const auto& spec = cfg_.flows[f];
      if (pinned()) {
        const Path& p = *routes_[fs.route_offset + rep.shortest];
        fs.shortest_acc += static_cast<double>(links_.length(p.links.front()));
        continue;
      }
      const auto q = bank_.levels_at(index_of(spec.src), fs.dest_index);
      fs.shortest_acc += q[static_cast<std::size_t>(rep.shortest_level)];
      if (second_half) {
        for (std::size_t m = 0; m < q.size(); ++m) fs.eta_acc[m] += q[m];
      }
    }
    if (second_half) ++second_half_slots_;
    if (t % cfg_.stride == 0 && t >= 2) {
      for (std::size_t f = 0; f < flows_.size(); ++f) {
        auto& rep = art_.flows[f];
        const auto& L = learners_[flows_[f].learner];
        ++rep.concentration_samples;
        for (std::size_t i = 0; i < L.size(); ++i) {
          const auto& s = L.stats()[i];
          if (std::abs(s.mean - rep.true_means[i]) <= exploration_bonus(t, s.count)) ++rep.concentration_ok[i];
        }
      }
    }
  }

  void emit_row(std::int64_t t, double qavg) {
    MetricsRow row;
    row.slot = t;
    row.regret_inc = window_.regret;
    row.regret_cum = regret_cum_;
    row.avg_queue_len = qavg;
    row.deliveries = window_.deliveries;
    if (window_.deliveries > 0) {
      row.avg_delay_us = window_.delay_sum / static_cast<double>(window_.deliveries) * kSlotMicroseconds;
    }
    for (auto& fs : flows_) {
      row.chosen_path.push_back(fs.window_chosen);
      row.genie_path.push_back(fs.window_genie);
      fs.window_chosen = -1;
      fs.window_genie = -1;
    }
    art_.rows.push_back(std::move(row));
    window_ = {};
  }

  void finish() {
    art_.in_system = bank_.total() + links_.total();
    const double slots = static_cast<double>(std::max<std::int64_t>(cfg_.horizon, 1));
    for (std::size_t f = 0; f < flows_.size(); ++f) {
      auto& rep = art_.flows[f];
      auto& fs = flows_[f];
      rep.final_stats = learners_[fs.learner].stats();
      rep.source_shortest_queue = fs.shortest_acc / slots;
      if (second_half_slots_ > 0) {
        for (std::size_t m = 0; m < rep.eta.size(); ++m) {
          rep.eta[m] = fs.eta_acc[m] / static_cast<double>(second_half_slots_);
        }
      }
    }
    art_.learner_count = learners_.size();
  }

  struct Window {
    double regret = 0.0;
    std::uint64_t deliveries = 0;
    double delay_sum = 0.0;
  };

  const SimConfig& cfg_;
  const Graph& g_;
  std::size_t n_;
  WeightModel model_;
  std::vector<NodeId> dests_;
  QueueBank bank_;
  LinkQueueBank links_;
  BackpressureContext ctx_;
  std::size_t max_hops_ = 0;
  std::vector<std::vector<int>> hop_dist_;
  std::vector<PathLearner> learners_;
  std::vector<double> spanner_bounds_;
  std::vector<std::size_t> enumerated_counts_;
  std::vector<std::int32_t> best_cache_;
  std::vector<std::int32_t> learner_at_;
  std::vector<FlowState> flows_;
  std::vector<const Path*> routes_;
  std::vector<PathStats> link_est_;
  std::vector<double> w0_;
  std::vector<double> w_;
  std::vector<std::vector<Observation>> pending_;
  std::vector<Staged> staged_;
  QueueSnapshot view_;
  std::vector<int> link_budget_;
  std::uint64_t next_uid_ = 1;
  double regret_cum_ = 0.0;
  double queue_time_sum_ = 0.0;
  std::int64_t second_half_slots_ = 0;
  Window window_;
  RunArtifact art_;
};

}  // namespace

RunArtifact run(const SimConfig& config) {
  config.validate();
  Simulator sim(config);
  return sim.run();
}

}  // namespace olsb
