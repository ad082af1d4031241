#pragma once

// Wishart log-densities and the inverse-Wishart collapsed block marginal.
// Everything is evaluated in log space; determinants come from Cholesky
// factors and failures surface as NotPositiveDefinite rather than jitter.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "mvw/errors.hpp"
#include "mvw/linalg.hpp"

namespace mvw {

/// Thread-safe log Gamma(x) for x > 0.
template <typename Scalar>
Scalar log_gamma(Scalar x) {
#if defined(__GLIBC__)
  int sign = 0;
  return static_cast<Scalar>(::lgamma_r(static_cast<double>(x), &sign));
#else
  return std::lgamma(x);
#endif
}

/// log Gamma_p(a) = p(p-1)/4 log(pi) + sum_{j=1..p} log Gamma(a - (j-1)/2).
template <typename Scalar>
Scalar log_multigamma(Scalar a, int p) {
  if (p < 1) throw std::domain_error("log_multigamma: dimension must be >= 1");
  if (!(a > Scalar(p - 1) / Scalar(2))) {
    throw std::domain_error("log_multigamma: requires a > (p-1)/2, got a=" + std::to_string(a) +
                            ", p=" + std::to_string(p));
  }
  Scalar out = Scalar(p) * Scalar(p - 1) / Scalar(4) * std::log(std::numbers::pi_v<Scalar>);
  for (int j = 1; j <= p; ++j) out += log_gamma(a - Scalar(j - 1) / Scalar(2));
  return out;
}

template <typename Scalar>
struct WishartParams {
  Scalar dof;
  Mat<Scalar> scale;
};

/// log W(M | T, Sigma) for SPD M and Sigma.
template <typename DerivedM, typename DerivedS>
typename DerivedM::Scalar log_wishart_density(const Eigen::MatrixBase<DerivedM>& m,
                                              typename DerivedM::Scalar dof,
                                              const Eigen::MatrixBase<DerivedS>& scale) {
  using Scalar = typename DerivedM::Scalar;
  const Eigen::Index p = m.rows();
  if (m.cols() != p || scale.rows() != p || scale.cols() != p) {
    throw DimensionMismatch("log_wishart_density: M and Sigma must be square of equal size");
  }
  if (!(dof > Scalar(p - 1))) {
    throw std::domain_error("log_wishart_density: degree of freedom must exceed p-1");
  }
  const Mat<Scalar> lm = cholesky_lower(m, "M");
  const Mat<Scalar> ls = cholesky_lower(scale, "Sigma");
  // tr(Sigma^{-1} M) = ||Ls^{-1} Lm||_F^2
  const Mat<Scalar> x = ls.template triangularView<Eigen::Lower>().solve(lm);
  const Scalar trace = x.squaredNorm();
  const Scalar pd = Scalar(p);
  return (dof - pd - Scalar(1)) / Scalar(2) * log_det_from_cholesky(lm) -
         pd * dof / Scalar(2) * std::log(Scalar(2)) - log_multigamma(dof / Scalar(2), int(p)) -
         trace / Scalar(2) - dof / Scalar(2) * log_det_from_cholesky(ls);
}

template <typename DerivedM>
typename DerivedM::Scalar log_wishart_density(const Eigen::MatrixBase<DerivedM>& m,
                                              const WishartParams<typename DerivedM::Scalar>& w) {
  return log_wishart_density(m, w.dof, w.scale);
}

/// log C_{M,T}: the part of the Wishart density that does not involve Sigma.
template <typename Scalar>
Scalar log_wishart_constant(Scalar log_det_m, Scalar dof, int p) {
  const Scalar pd = Scalar(p);
  return (dof - pd - Scalar(1)) / Scalar(2) * log_det_m - pd * dof / Scalar(2) * std::log(Scalar(2)) -
         log_multigamma(dof / Scalar(2), p);
}

/// Sufficient statistics of one (view, object cluster, node cluster) block.
template <typename Scalar>
struct BlockStats {
  Mat<Scalar> sum_matrix;
  int count = 0;

  Eigen::Index dim() const { return sum_matrix.rows(); }
};

/// Prior degree of freedom for a block of dimension dim: dim + 3.
template <typename Scalar = double>
constexpr Scalar prior_dof(int dim) {
  return Scalar(dim + 3);
}

/// Prior scale (nu - dim - 1) I / T. With nu = dim + 3 this is always 2I/T.
template <typename Scalar = double>
Mat<Scalar> prior_scale(int dim, Scalar dof) {
  return Mat<Scalar>::Identity(dim, dim) * (Scalar(2) / dof);
}

/// log of the Sigma-integrated product of g(M_i, T, Sigma) under an
/// inverse-Wishart(S, nu) prior. Depends only on (sum_matrix, count).
template <typename Scalar, typename DerivedS>
Scalar log_block_marginal(const BlockStats<Scalar>& stats, Scalar dof, Scalar nu,
                          const Eigen::MatrixBase<DerivedS>& prior_scale_matrix) {
  if (stats.count < 0) throw std::invalid_argument("log_block_marginal: negative count");
  if (stats.count == 0) return Scalar(0);
  const Eigen::Index p = stats.dim();
  if (prior_scale_matrix.rows() != p || prior_scale_matrix.cols() != p) {
    throw DimensionMismatch("log_block_marginal: prior scale and block sum differ in size");
  }
  if (!(nu > Scalar(p - 1))) throw std::domain_error("log_block_marginal: nu must exceed dim-1");
  const Scalar c = Scalar(stats.count);
  const Scalar pd = Scalar(p);
  const Scalar post_dof = nu + c * dof;
  const Scalar log_det_s = log_det_spd(prior_scale_matrix, "prior scale");
  const Mat<Scalar> post_scale = prior_scale_matrix + stats.sum_matrix;
  const Scalar log_det_post = log_det_spd(post_scale, "S + block sum");
  return nu / Scalar(2) * log_det_s - post_dof / Scalar(2) * log_det_post +
         c * dof * pd / Scalar(2) * std::log(Scalar(2)) + log_multigamma(post_dof / Scalar(2), int(p)) -
         log_multigamma(nu / Scalar(2), int(p));
}

/// Block marginal with the default prior nu = dim + 3, S = 2I/T.
template <typename Scalar>
Scalar log_block_marginal(const BlockStats<Scalar>& stats, Scalar dof) {
  const int p = int(stats.dim());
  return log_block_marginal(stats, dof, prior_dof<Scalar>(p), prior_scale<Scalar>(p, dof));
}

/// log W(B | T, A / T): B scored by a Wishart whose mean is A, the scaling
/// under which correlation matrices are modeled. Not symmetric in (A, B).
/// For fixed B it peaks at A = B.
template <typename DerivedB, typename DerivedA>
typename DerivedB::Scalar wishart_similarity(const Eigen::MatrixBase<DerivedB>& b,
                                             const Eigen::MatrixBase<DerivedA>& a,
                                             typename DerivedB::Scalar dof) {
  using Scalar = typename DerivedB::Scalar;
  const Mat<Scalar> scale = a.derived() / dof;
  return log_wishart_density(b, dof, scale);
}

}  // namespace mvw
