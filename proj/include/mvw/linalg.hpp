#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "mvw/errors.hpp"

namespace mvw {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Lower Cholesky factor of an SPD matrix; throws NotPositiveDefinite.
template <typename Derived>
Mat<typename Derived::Scalar> cholesky_lower(const Eigen::MatrixBase<Derived>& a,
                                             const char* what = "matrix") {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) throw DimensionMismatch(std::string(what) + " is not square");
  Eigen::LLT<Mat<Scalar>> llt(a.derived());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(std::string(what) + " is not positive definite");
  }
  Mat<Scalar> l = llt.matrixL();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    if (!(l(i, i) > Scalar(0)) || !std::isfinite(l(i, i))) {
      throw NotPositiveDefinite(std::string(what) + " is not positive definite");
    }
  }
  return l;
}

template <typename Derived>
typename Derived::Scalar log_det_from_cholesky(const Eigen::MatrixBase<Derived>& l) {
  return typename Derived::Scalar(2) * l.diagonal().array().log().sum();
}

/// log|A| for SPD A via Cholesky.
template <typename Derived>
typename Derived::Scalar log_det_spd(const Eigen::MatrixBase<Derived>& a,
                                     const char* what = "matrix") {
  return log_det_from_cholesky(cholesky_lower(a, what));
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& a, typename Derived::Scalar tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol;
}

// Eigenvalues below this are rejected by the symmetric root functions.
inline constexpr double kEigenFloor = 1e-12;

namespace detail {

template <typename Derived>
Mat<typename Derived::Scalar> spectral_power(const Eigen::MatrixBase<Derived>& a,
                                             typename Derived::Scalar power) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(a.derived());
  if (es.info() != Eigen::Success) throw NotPositiveDefinite("eigendecomposition failed");
  const Vec<Scalar>& ev = es.eigenvalues();
  if (ev.minCoeff() < Scalar(kEigenFloor)) {
    throw NotPositiveDefinite("matrix has an eigenvalue below the floor 1e-12");
  }
  const Mat<Scalar>& u = es.eigenvectors();
  Vec<Scalar> d = ev.array().pow(power);
  Mat<Scalar> out = u * d.asDiagonal() * u.transpose();
  return Scalar(0.5) * (out + out.transpose());
}

}  // namespace detail

/// Symmetric square root U diag(sqrt(l)) U' of an SPD matrix.
template <typename Derived>
Mat<typename Derived::Scalar> sym_sqrt(const Eigen::MatrixBase<Derived>& a) {
  return detail::spectral_power(a, typename Derived::Scalar(0.5));
}

template <typename Derived>
Mat<typename Derived::Scalar> sym_inv_sqrt(const Eigen::MatrixBase<Derived>& a) {
  return detail::spectral_power(a, typename Derived::Scalar(-0.5));
}

/// D^{-1/2} A D^{-1/2} with D = diag(A).
template <typename Derived>
Mat<typename Derived::Scalar> to_correlation(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) throw DimensionMismatch("to_correlation: matrix is not square");
  if ((a.diagonal().array() <= Scalar(0)).any()) {
    throw NotPositiveDefinite("to_correlation: non-positive diagonal entry");
  }
  Vec<Scalar> s = a.diagonal().array().rsqrt();
  Mat<Scalar> r = s.asDiagonal() * a.derived() * s.asDiagonal();
  r = (Scalar(0.5) * (r + r.transpose())).eval();
  r.diagonal().setOnes();
  return r;
}

/// In-place Cholesky of the leading n x n block of a column-major buffer with
/// leading dimension ld; returns log|A|, or NaN if A is not PD. No allocation.
double log_det_spd_inplace(double* a, int n, int ld) noexcept;

}  // namespace mvw
