#include "olsb/spanner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace olsb {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Indices of a maximal linearly independent prefix-greedy subset.
std::vector<std::size_t> greedy_basis(const MatrixXd& A) {
  std::vector<std::size_t> picked;
  std::vector<VectorXd> ortho;
  for (Eigen::Index j = 0; j < A.rows(); ++j) {
    VectorXd r = A.row(j).transpose();
    const double norm0 = r.norm();
    for (const auto& q : ortho) r -= q.dot(r) * q;
    for (const auto& q : ortho) r -= q.dot(r) * q;  // second pass for stability
    if (r.norm() > 1e-8 * std::max(norm0, 1.0)) {
      ortho.push_back(r / r.norm());
      picked.push_back(static_cast<std::size_t>(j));
    }
  }
  return picked;
}

// Coordinates of every row of A in the basis formed by rows `basis`:
// A.row(j) = sum_i coef(j, i) * A.row(basis[i]).
MatrixXd coordinates(const MatrixXd& A, const std::vector<std::size_t>& basis) {
  MatrixXd Bt(A.cols(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    Bt.col(static_cast<Eigen::Index>(i)) = A.row(static_cast<Eigen::Index>(basis[i])).transpose();
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(Bt);
  return qr.solve(A.transpose()).transpose();
}

double binomial_capped(std::size_t n, std::size_t k, double cap) {
  double c = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (c > cap) return c;
  }
  return c;
}

// Exhaustive search for the r-subset maximising |det| of its coordinate rows
// (proportional to the volume of the spanned parallelotope).
std::vector<std::size_t> exact_basis(const MatrixXd& coef, std::size_t r) {
  const std::size_t n = static_cast<std::size_t>(coef.rows());
  std::vector<std::size_t> idx(r);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::size_t> best = idx;
  double best_det = -1.0;
  MatrixXd sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
  for (;;) {
    for (std::size_t i = 0; i < r; ++i) sub.row(static_cast<Eigen::Index>(i)) = coef.row(static_cast<Eigen::Index>(idx[i]));
    const double d = std::abs(sub.fullPivLu().determinant());
    if (d > best_det * (1.0 + 1e-12) + 1e-300) {
      best_det = d;
      best = idx;
    }
    // next combination in lexicographic order
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == n - r + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t k = i; k < r; ++k) idx[k] = idx[k - 1] + 1;
  }
  return best;
}

// Determinant-swap local search: replace base i by path j while some
// |coef(j, i)| exceeds C. Each swap multiplies |det| by that coefficient.
std::vector<std::size_t> swap_basis(const MatrixXd& A, std::vector<std::size_t> basis, double C) {
  MatrixXd coef = coordinates(A, basis);
  const Eigen::Index n = coef.rows();
  const Eigen::Index r = coef.cols();
  std::vector<bool> in_basis(static_cast<std::size_t>(n), false);
  for (auto b : basis) in_basis[b] = true;
  int since_refactor = 0;
  for (;;) {
    double best = C + 1e-9;
    Eigen::Index bj = -1, bi = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (in_basis[static_cast<std::size_t>(j)]) continue;
      for (Eigen::Index i = 0; i < r; ++i) {
        const double a = std::abs(coef(j, i));
        if (a > best) {
          best = a;
          bj = j;
          bi = i;
        }
      }
    }
    if (bj < 0) break;
    in_basis[basis[static_cast<std::size_t>(bi)]] = false;
    in_basis[static_cast<std::size_t>(bj)] = true;
    basis[static_cast<std::size_t>(bi)] = static_cast<std::size_t>(bj);
    if (++since_refactor >= 32) {
      coef = coordinates(A, basis);
      since_refactor = 0;
      continue;
    }
    const VectorXd pivot_row = coef.row(bj);
    const VectorXd newcol = coef.col(bi) / pivot_row(bi);
    for (Eigen::Index k = 0; k < r; ++k) {
      if (k == bi) continue;
      coef.col(k) -= newcol * pivot_row(k);
    }
    coef.col(bi) = newcol;
  }
  return basis;
}

}  // namespace

SpannerSet build_spanner(const std::vector<Path>& paths, const SpannerOptions& opts) {
  if (paths.empty()) throw SpanError("build_spanner: empty path set");
  if (!(opts.approx_C >= 1.0)) throw SpanError("build_spanner: approximation factor must be >= 1");
  const std::size_t n_links = paths.front().incidence.size();
  MatrixXd A(static_cast<Eigen::Index>(paths.size()), static_cast<Eigen::Index>(n_links));
  for (std::size_t j = 0; j < paths.size(); ++j) {
    if (paths[j].incidence.size() != n_links) throw SpanError("build_spanner: inconsistent incidence length");
    for (std::size_t e = 0; e < n_links; ++e) A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(e)) = paths[j].incidence[e];
  }

  std::vector<std::size_t> basis = greedy_basis(A);
  const std::size_t r = basis.size();
  SpannerSet out;
  if (paths.size() <= opts.exact_path_limit &&
      binomial_capped(paths.size(), r, static_cast<double>(opts.max_exact_bases)) <=
          static_cast<double>(opts.max_exact_bases)) {
    basis = exact_basis(coordinates(A, basis), r);
    out.coefficient_bound = 1.0;
    out.exact = true;
  } else {
    // A 1-approximate local optimum is cheap on small inputs and gives the
    // tighter bound; larger families use the configured factor.
    const double C = paths.size() <= opts.exact_path_limit ? 1.0 : opts.approx_C;
    basis = swap_basis(A, std::move(basis), C);
    out.coefficient_bound = C;
  }

  std::sort(basis.begin(), basis.end(), [&](std::size_t a, std::size_t b) { return paths[a].id < paths[b].id; });
  for (auto b : basis) out.base_paths.push_back(paths[b]);
  return out;
}

Eigen::VectorXd express_in_spanner(const Path& p, const SpannerSet& s) {
  if (s.base_paths.empty()) throw SpanError("express_in_spanner: empty spanner");
  const auto n_links = static_cast<Eigen::Index>(p.incidence.size());
  MatrixXd Bt(n_links, static_cast<Eigen::Index>(s.base_paths.size()));
  VectorXd a(n_links);
  for (Eigen::Index e = 0; e < n_links; ++e) a(e) = p.incidence[static_cast<std::size_t>(e)];
  for (std::size_t i = 0; i < s.base_paths.size(); ++i) {
    const auto& inc = s.base_paths[i].incidence;
    if (static_cast<Eigen::Index>(inc.size()) != n_links) throw SpanError("express_in_spanner: incidence length mismatch");
    for (Eigen::Index e = 0; e < n_links; ++e) Bt(e, static_cast<Eigen::Index>(i)) = inc[static_cast<std::size_t>(e)];
  }
  VectorXd c = Bt.colPivHouseholderQr().solve(a);
  if ((Bt * c - a).norm() >= 1e-9) {
    throw SpanError("express_in_spanner: path " + std::to_string(p.id) + " is outside the spanner's span");
  }
  return c;
}

double gram_determinant(const std::vector<Path>& base) {
  if (base.empty()) return 1.0;
  const auto n_links = static_cast<Eigen::Index>(base.front().incidence.size());
  MatrixXd B(static_cast<Eigen::Index>(base.size()), n_links);
  for (std::size_t i = 0; i < base.size(); ++i) {
    for (Eigen::Index e = 0; e < n_links; ++e) B(static_cast<Eigen::Index>(i), e) = base[i].incidence[static_cast<std::size_t>(e)];
  }
  return (B * B.transpose()).fullPivLu().determinant();
}

}  // namespace olsb
