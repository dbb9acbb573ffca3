#include "olsb/link_model.hpp"

#include <cmath>
#include <sstream>

namespace olsb {

namespace {

// Marsaglia-Tsang gamma(shape, 1) variate.
double sample_gamma(double shape, CounterStream& rng) {
  if (shape < 1.0) {
    const double u = rng.uniform_open();
    return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

WeightDistribution WeightDistribution::uniform(double a, double b) {
  if (!(a >= 0.0 && a <= b && b <= 1.0)) {
    throw ConfigError("uniform(a,b) needs 0 <= a <= b <= 1");
  }
  return {Kind::kUniform, a, b};
}

WeightDistribution WeightDistribution::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("bernoulli(p) needs 0 <= p <= 1");
  return {Kind::kBernoulli, p, 0.0};
}

WeightDistribution WeightDistribution::beta(double alpha, double beta) {
  if (!(alpha > 0.0 && beta > 0.0)) throw ConfigError("beta(alpha,beta) needs alpha, beta > 0");
  return {Kind::kBeta, alpha, beta};
}

WeightDistribution WeightDistribution::constant(double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("constant(c) needs 0 <= c <= 1");
  return {Kind::kConstant, c, 0.0};
}

double WeightDistribution::mean() const {
  switch (kind_) {
    case Kind::kUniform: return 0.5 * (p0_ + p1_);
    case Kind::kBernoulli: return p0_;
    case Kind::kBeta: return p0_ / (p0_ + p1_);
    case Kind::kConstant: return p0_;
  }
  return 0.0;
}

double WeightDistribution::sample(CounterStream& rng) const {
  switch (kind_) {
    case Kind::kUniform: return p0_ + (p1_ - p0_) * rng.uniform();
    case Kind::kBernoulli: return rng.uniform() < p0_ ? 1.0 : 0.0;
    case Kind::kBeta: {
      const double x = sample_gamma(p0_, rng);
      const double y = sample_gamma(p1_, rng);
      return x / (x + y);
    }
    case Kind::kConstant: return p0_;
  }
  return 0.0;
}

std::string WeightDistribution::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kUniform: os << "uniform(" << p0_ << "," << p1_ << ")"; break;
    case Kind::kBernoulli: os << "bernoulli(" << p0_ << ")"; break;
    case Kind::kBeta: os << "beta(" << p0_ << "," << p1_ << ")"; break;
    case Kind::kConstant: os << "constant(" << p0_ << ")"; break;
  }
  return os.str();
}

WeightModel::WeightModel(std::vector<WeightDistribution> per_link, std::uint64_t seed)
    : dists_(std::move(per_link)), seed_(seed) {}

SlotWeights WeightModel::sample_slot(std::int64_t t) const {
  SlotWeights w{t, std::vector<double>(dists_.size())};
  sample_into(t, w.weights);
  return w;
}

void WeightModel::sample_into(std::int64_t t, std::span<double> out) const {
  for (std::size_t e = 0; e < dists_.size(); ++e) {
    CounterStream rng(seed_, RngDomain::kLinkWeight, static_cast<std::uint32_t>(e),
                      static_cast<std::uint64_t>(t));
    out[e] = dists_[e].sample(rng);
  }
}

std::vector<WeightDistribution> heterogeneous_uniform(std::size_t n_links, std::uint64_t meta_seed,
                                                      double lo, double hi, double width) {
  if (!(lo >= 0.0 && width >= 0.0 && lo + width <= hi && hi <= 1.0)) {
    throw ConfigError("heterogeneous_uniform needs 0 <= lo, lo + width <= hi <= 1");
  }
  std::vector<WeightDistribution> out;
  out.reserve(n_links);
  for (std::size_t e = 0; e < n_links; ++e) {
    CounterStream rng(meta_seed, RngDomain::kLinkMeta, static_cast<std::uint32_t>(e), 0);
    const double a = lo + (hi - width - lo) * rng.uniform();
    out.push_back(WeightDistribution::uniform(a, a + width));
  }
  return out;
}

double path_cost(const Path& p, std::span<const double> weights, std::size_t n_nodes) {
  double sum = 0.0;
  for (LinkId e : p.links) sum += weights[index_of(e)];
  return sum / static_cast<double>(n_nodes);
}

double path_cost(const Path& p, const SlotWeights& w, std::size_t n_nodes) {
  return path_cost(p, std::span<const double>(w.weights), n_nodes);
}

double path_mean(const Path& p, const WeightModel& model, std::size_t n_nodes) {
  double sum = 0.0;
  for (LinkId e : p.links) sum += model.true_mean(e);
  return sum / static_cast<double>(n_nodes);
}

}  // namespace olsb
