#include "olsb/backpressure.hpp"

#include <algorithm>
#include <limits>

namespace olsb {

double queue_pressure(std::uint32_t q_from, std::uint32_t q_to, double c_m, double c_m_to, double w) {
  if (c_m_to <= std::max(c_m - w, 0.0)) return static_cast<double>(q_from) - static_cast<double>(q_to);
  return -std::numeric_limits<double>::infinity();
}

namespace {

std::size_t at(const QueueSnapshot& s, std::size_t v, std::size_t di, std::size_t m) {
  return (v * s.destinations.size() + di) * s.n_levels + m;
}

// Best positive pressure for one destination on one link; 0 and empty when none.
LinkPressure dest_pressure(const Link& link, std::size_t di, const QueueSnapshot& view,
                           const BackpressureContext& ctx, double wn) {
  LinkPressure out;
  const std::size_t M = view.n_levels;
  const std::size_t v = index_of(link.src);
  const std::size_t v2 = index_of(link.dst);
  if (!ctx.can_reach[di][v2]) return out;
  const std::uint32_t* src = view.lengths.data() + at(view, v, di, 0);
  const std::size_t first = ctx.budget ? static_cast<std::size_t>(ctx.min_source_level) : 0;
  std::size_t top = M;
  for (std::size_t m = M; m-- > first;) {
    if (src[m] != 0) {
      top = m;
      break;
    }
  }
  if (top == M) return out;

  const bool to_dest = view.destinations[di] == link.dst;
  // Prefix argmin over the receiving node's levels. Equal queues resolve to
  // the highest level so a packet keeps as much budget as it can.
  std::uint32_t pref_min[256];
  int pref_arg[256];
  if (!to_dest) {
    const std::uint32_t* dst = view.lengths.data() + at(view, v2, di, 0);
    std::uint32_t mn = std::numeric_limits<std::uint32_t>::max();
    int arg = 0;
    const std::size_t last = ctx.budget ? top : M - 1;
    for (std::size_t m = 0; m <= last; ++m) {
      if (dst[m] <= mn) {
        mn = dst[m];
        arg = static_cast<int>(m);
      }
      pref_min[m] = mn;
      pref_arg[m] = arg;
    }
  }
  double best = 0.0;
  for (std::size_t m = first; m <= top; ++m) {
    if (src[m] == 0) continue;
    int target = 0;
    std::uint32_t q_to = 0;
    if (!to_dest) {
      const int bound = ctx.budget ? ctx.levels->max_target_level(static_cast<int>(m), wn) : static_cast<int>(M) - 1;
      target = pref_arg[bound];
      q_to = pref_min[bound];
    }
    const double p = static_cast<double>(src[m]) - static_cast<double>(q_to);
    if (p > best) {
      best = p;
      out.best = BackpressureDecision{link.id, view.destinations[di], static_cast<int>(m), target, p};
    }
  }
  out.pressure = best;
  return out;
}

}  // namespace

LinkPressure link_pressure(const Link& link, const QueueSnapshot& view, const BackpressureContext& ctx, double w) {
  if (view.n_levels > 256) throw ConfigError("link_pressure: at most 256 levels");
  LinkPressure out;
  for (std::size_t di = 0; di < view.destinations.size(); ++di) {
    LinkPressure lp = dest_pressure(link, di, view, ctx, w / ctx.weight_norm);
    if (lp.pressure > out.pressure) out = lp;
  }
  return out;
}

std::vector<BackpressureDecision> schedule_node(NodeId v, QueueSnapshot& view, const BackpressureContext& ctx,
                                                std::span<const double> weights, int cap,
                                                std::vector<int>& link_budget) {
  if (view.n_levels > 256) throw ConfigError("schedule_node: at most 256 levels");
  std::vector<BackpressureDecision> moves;
  // Receivers see this node's earlier moves while it decides, but later
  // senders must still see the true slot-start backlog at those receivers.
  std::vector<std::size_t> bumped;
  const auto& out_links = ctx.graph->out_links(v);
  const std::size_t D = view.destinations.size();
  std::vector<LinkPressure> table(out_links.size() * D);
  const auto refresh = [&](std::size_t di) {
    for (std::size_t k = 0; k < out_links.size(); ++k) {
      const LinkId e = out_links[k];
      table[k * D + di] = dest_pressure(ctx.graph->link(e), di, view, ctx, weights[index_of(e)] / ctx.weight_norm);
    }
  };
  for (std::size_t di = 0; di < D; ++di) refresh(di);
  for (int sent = 0; sent < cap; ++sent) {
    const LinkPressure* best = nullptr;
    for (std::size_t k = 0; k < out_links.size(); ++k) {
      if (link_budget[index_of(out_links[k])] <= 0) continue;
      for (std::size_t di = 0; di < D; ++di) {
        const LinkPressure& lp = table[k * D + di];
        if (lp.best && (!best || lp.pressure > best->pressure)) best = &lp;
      }
    }
    if (!best) break;
    const BackpressureDecision d = *best->best;
    const Link& l = ctx.graph->link(d.link);
    const auto di = static_cast<std::size_t>(view.dest_slot[index_of(d.dest)]);
    --view.lengths[at(view, index_of(v), di, static_cast<std::size_t>(d.from_level))];
    if (l.dst != d.dest) {
      const std::size_t k = at(view, index_of(l.dst), di, static_cast<std::size_t>(d.to_level));
      ++view.lengths[k];
      bumped.push_back(k);
    }
    --link_budget[index_of(d.link)];
    moves.push_back(d);
    refresh(di);
  }
  for (std::size_t k : bumped) --view.lengths[k];
  return moves;
}

std::optional<BackpressureDecision> forward_level0(NodeId v, NodeId d, const Path& estimated_shortest,
                                                   const QueueSnapshot& view) {
  if (estimated_shortest.links.empty() || estimated_shortest.src != v || estimated_shortest.dst != d) {
    throw ConfigError("forward_level0: no path from the node to the destination");
  }
  if (view.at(v, d, 0) == 0) return std::nullopt;
  return BackpressureDecision{estimated_shortest.links.front(), d, 0, 0, 0.0};
}

}  // namespace olsb
