#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "olsb/topology.hpp"

namespace olsb {

class SpanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Barycentric spanner of a path family: a basis of the span of the path
/// incidence vectors such that every path is a combination of base paths
/// with coefficients in [-C, C].
struct SpannerSet {
  std::vector<Path> base_paths;  // ascending path id
  double coefficient_bound = 1.0;
  bool exact = false;            // true when the determinant was maximised exhaustively
};

struct SpannerOptions {
  double approx_C = 2.0;
  /// Exhaustive determinant maximisation is used when the input has at most
  /// this many paths and the number of candidate bases stays under
  /// max_exact_bases.
  std::size_t exact_path_limit = 32;
  std::size_t max_exact_bases = 20000;
};

/// Awerbuch-Kleinberg determinant-swap construction. Deterministic given
/// input order; ties between equal determinants go to the lowest path id.
/// Throws SpanError on an empty input.
SpannerSet build_spanner(const std::vector<Path>& paths, const SpannerOptions& opts = {});
inline SpannerSet build_spanner(const std::vector<Path>& paths, double approx_C) {
  SpannerOptions o;
  o.approx_C = approx_C;
  return build_spanner(paths, o);
}

/// Coefficients c with sum_i c_i * base_i == p (least squares, residual
/// checked). Throws SpanError if p lies outside the span.
Eigen::VectorXd express_in_spanner(const Path& p, const SpannerSet& s);

/// det(B B^T) of the base incidence rows.
double gram_determinant(const std::vector<Path>& base);

}  // namespace olsb
