#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "olsb/rng.hpp"
#include "olsb/topology.hpp"

namespace olsb {

/// Distribution of one link's per-slot weight; support inside [0, 1].
class WeightDistribution {
 public:
  enum class Kind { kUniform, kBernoulli, kBeta, kConstant };

  static WeightDistribution uniform(double a, double b);
  static WeightDistribution bernoulli(double p);
  static WeightDistribution beta(double alpha, double beta);
  static WeightDistribution constant(double c);

  Kind kind() const { return kind_; }
  double p0() const { return p0_; }
  double p1() const { return p1_; }

  double mean() const;
  double sample(CounterStream& rng) const;

  std::string describe() const;

 private:
  WeightDistribution(Kind kind, double p0, double p1) : kind_(kind), p0_(p0), p1_(p1) {}

  Kind kind_;
  double p0_;
  double p1_;
};

struct SlotWeights {
  std::int64_t slot = 0;
  std::vector<double> weights;  ///< indexed by LinkId
};

/// Per-link weight distributions plus the seed that drives sampling.
///
/// Sampling is a pure function of (seed, link, slot): the same model replays
/// the same weights regardless of call order or thread.
class WeightModel {
 public:
  WeightModel(std::vector<WeightDistribution> per_link, std::uint64_t seed);

  std::size_t link_count() const { return dists_.size(); }
  std::uint64_t seed() const { return seed_; }
  const WeightDistribution& distribution(LinkId e) const { return dists_.at(index_of(e)); }

  SlotWeights sample_slot(std::int64_t t) const;
  void sample_into(std::int64_t t, std::span<double> out) const;
  double true_mean(LinkId e) const { return distribution(e).mean(); }

 private:
  std::vector<WeightDistribution> dists_;
  std::uint64_t seed_;
};

/// uniform(a_e, a_e + width) per link with a_e ~ U(lo, hi - width) drawn
/// once from meta_seed. Heterogeneous unknown means for the learners.
std::vector<WeightDistribution> heterogeneous_uniform(std::size_t n_links, std::uint64_t meta_seed,
                                                      double lo, double hi, double width);

/// (1/n_nodes) * sum of the slot weights over the path's links.
double path_cost(const Path& p, const SlotWeights& w, std::size_t n_nodes);
double path_cost(const Path& p, std::span<const double> weights, std::size_t n_nodes);
/// Same normalisation applied to the true link means.
double path_mean(const Path& p, const WeightModel& model, std::size_t n_nodes);

}  // namespace olsb
