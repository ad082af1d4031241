#include "mvw/preprocess.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

#include "mvw/errors.hpp"
#include "mvw/linalg.hpp"

namespace mvw {

namespace {

Eigen::MatrixXd centered(const Eigen::MatrixXd& series) {
  if (series.rows() < 2) throw std::invalid_argument("series needs at least 2 time points");
  if (series.cols() < 1) throw std::invalid_argument("series has no columns");
  return series.rowwise() - series.colwise().mean();
}

Eigen::VectorXd column_scales(const Eigen::MatrixXd& x) {
  Eigen::VectorXd ss = x.colwise().squaredNorm().transpose();
  for (Eigen::Index j = 0; j < ss.size(); ++j) {
    const double scale = x.col(j).cwiseAbs().maxCoeff();
    if (!(ss(j) > 0.0) || scale == 0.0) {
      throw std::invalid_argument("series column " + std::to_string(j) + " is constant");
    }
  }
  return ss;
}

}  // namespace

Eigen::MatrixXd empirical_correlation(const Eigen::MatrixXd& series) {
  const Eigen::MatrixXd x = centered(series);
  const Eigen::VectorXd ss = column_scales(x);
  const Eigen::VectorXd inv = ss.array().rsqrt();
  Eigen::MatrixXd cov = x.transpose() * x;
  Eigen::MatrixXd r = inv.asDiagonal() * cov * inv.asDiagonal();
  r = (0.5 * (r + r.transpose())).eval();
  r.diagonal().setOnes();
  return r;
}

ShrinkageEstimate ledoit_wolf(const Eigen::MatrixXd& sample_cov, const Eigen::MatrixXd& x) {
  const Eigen::Index p = sample_cov.rows();
  const double t = double(x.rows());
  if (sample_cov.cols() != p || x.cols() != p) throw DimensionMismatch("ledoit_wolf: shape mismatch");
  if (x.rows() < 2) throw std::invalid_argument("ledoit_wolf: needs at least 2 time points");
  const double mu = sample_cov.trace() / double(p);
  if (!(sample_cov.cwiseAbs().maxCoeff() > 0.0)) throw std::invalid_argument("ledoit_wolf: degenerate all-zero input");

  // d^2 = ||S - mu I||^2 / p; b^2 = min(d^2, sum_k ||x_k x_k' - S||^2 / (T^2 p)).
  Eigen::MatrixXd target_gap = sample_cov;
  target_gap.diagonal().array() -= mu;
  const double d2 = target_gap.squaredNorm() / double(p);
  const double fourth = x.rowwise().squaredNorm().array().square().sum();
  const double b2_bar = (fourth / t - sample_cov.squaredNorm()) / (t * double(p));
  const double b2 = std::min(std::max(b2_bar, 0.0), d2);

  ShrinkageEstimate est;
  est.shrinkage = d2 > 0.0 ? b2 / d2 : 0.0;
  est.covariance = (1.0 - est.shrinkage) * sample_cov;
  est.covariance.diagonal().array() += est.shrinkage * mu;
  return est;
}

ShrinkageEstimate ledoit_wolf(const Eigen::MatrixXd& series) {
  const Eigen::MatrixXd x = centered(series);
  const Eigen::MatrixXd s = x.transpose() * x / double(x.rows());
  return ledoit_wolf(s, x);
}

ShrinkageEstimate ledoit_wolf_correlation(const Eigen::MatrixXd& series) {
  Eigen::MatrixXd x = centered(series);
  const Eigen::VectorXd ss = column_scales(x);
  const Eigen::VectorXd inv_sd = (ss / double(x.rows())).array().rsqrt();
  x = x * inv_sd.asDiagonal();
  Eigen::MatrixXd s = x.transpose() * x / double(x.rows());
  s = (0.5 * (s + s.transpose())).eval();
  s.diagonal().setOnes();
  ShrinkageEstimate est = ledoit_wolf(s, x);
  est.covariance.diagonal().setOnes();
  return est;
}

Eigen::MatrixXd mean_matrix(const Dataset& data) {
  if (data.matrices.empty()) throw std::invalid_argument("mean of an empty dataset");
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(data.p(), data.p());
  for (const auto& m : data.matrices) {
    if (m.rows() != mean.rows() || m.cols() != mean.cols()) throw DimensionMismatch("dataset matrices differ in size");
    mean += m;
  }
  return mean / double(data.n());
}

Eigen::MatrixXd pooled_mean_matrix(std::span<const Dataset> sets) {
  if (sets.empty()) throw std::invalid_argument("pooled mean of no datasets");
  Eigen::MatrixXd mean;
  long count = 0;
  for (const auto& d : sets) {
    for (const auto& m : d.matrices) {
      if (count == 0) {
        mean = Eigen::MatrixXd::Zero(m.rows(), m.cols());
      } else if (m.rows() != mean.rows() || m.cols() != mean.cols()) {
        throw DimensionMismatch("pooled datasets differ in node count");
      }
      mean += m;
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("pooled mean of empty datasets");
  return mean / double(count);
}

WhitenResult whiten(const Dataset& data, const std::optional<Eigen::MatrixXd>& mean) {
  WhitenResult out;
  out.report.mean_matrix = mean ? *mean : mean_matrix(data);
  const auto& mbar = out.report.mean_matrix;
  if (mbar.rows() != data.p() || mbar.cols() != data.p()) throw DimensionMismatch("whitening mean has the wrong size");
  out.report.mean_inv_sqrt = sym_inv_sqrt(mbar);
  out.report.mean_sqrt = sym_sqrt(mbar);

  out.data = data;
  const Eigen::MatrixXd& w = out.report.mean_inv_sqrt;
  for (auto& m : out.data.matrices) {
    Eigen::MatrixXd white = w * m * w;
    white = (0.5 * (white + white.transpose())).eval();
    m = data.kind == MatrixKind::correlation ? to_correlation(white) : white;
  }
  return out;
}

double importance(int roi, std::span<const int> view_nodes, const WhitenReport& report, ImportanceScale scale) {
  const Eigen::Index p = report.mean_sqrt.rows();
  if (roi < 0 || roi >= p) throw std::out_of_range("importance: node index out of range");
  if (view_nodes.empty()) {
    std::cerr << "warning: importance over an empty view is 0\n";
    return 0.0;
  }
  const Eigen::MatrixXd& root = report.mean_sqrt;
  double total = 0.0;
  for (int u : view_nodes) {
    if (u < 0 || u >= p) throw std::out_of_range("importance: view node index out of range");
    double r = root(roi, u);
    if (scale == ImportanceScale::normalized) r /= std::sqrt(root(roi, roi) * root(u, u));
    total += std::abs(r);
  }
  return total;
}

std::vector<double> importance_profile(std::span<const int> view_nodes, const WhitenReport& report,
                                       ImportanceScale scale) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < report.mean_sqrt.rows(); ++i) {
    out.push_back(importance(static_cast<int>(i), view_nodes, report, scale));
  }
  return out;
}

}  // namespace mvw
