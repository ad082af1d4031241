#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mvw/model.hpp"

namespace mvw {

/// Pearson correlation of the columns of a T x p series. Diagonal is exactly 1.
Eigen::MatrixXd empirical_correlation(const Eigen::MatrixXd& series);

struct ShrinkageEstimate {
  Eigen::MatrixXd covariance;
  double shrinkage = 0.0;
};

/// Ledoit-Wolf shrinkage of the sample covariance S = X'X / T of the
/// centered series towards mu I, mu = tr(S) / p.
ShrinkageEstimate ledoit_wolf(const Eigen::MatrixXd& series);

/// Same estimator given S and the centered series it was computed from.
ShrinkageEstimate ledoit_wolf(const Eigen::MatrixXd& sample_cov, const Eigen::MatrixXd& centered_series);

/// Ledoit-Wolf on the standardized series; the result keeps a unit diagonal.
ShrinkageEstimate ledoit_wolf_correlation(const Eigen::MatrixXd& series);

struct WhitenReport {
  Eigen::MatrixXd mean_matrix;    // M-bar
  Eigen::MatrixXd mean_inv_sqrt;  // M-bar^{-1/2}
  Eigen::MatrixXd mean_sqrt;      // M-bar^{1/2}: original x whitened node cross-covariance
};

struct WhitenResult {
  Dataset data;
  WhitenReport report;
};

Eigen::MatrixXd mean_matrix(const Dataset& data);

/// Mean matrix over the union of several datasets (all subjects pooled).
Eigen::MatrixXd pooled_mean_matrix(std::span<const Dataset> sets);

/// M_i -> M-bar^{-1/2} M_i M-bar^{-1/2}; correlation datasets are
/// re-normalized to unit diagonal afterwards. `mean` overrides M-bar.
WhitenResult whiten(const Dataset& data, const std::optional<Eigen::MatrixXd>& mean = std::nullopt);

enum class ImportanceScale {
  normalized,  // M-bar^{1/2} rescaled by its own diagonal
  raw,         // M-bar^{1/2} entries as they are
};

/// sum over whitened nodes u in the view of |r(roi, u)|.
double importance(int roi, std::span<const int> view_nodes, const WhitenReport& report,
                  ImportanceScale scale = ImportanceScale::normalized);

/// importance(i, view) for every original node i.
std::vector<double> importance_profile(std::span<const int> view_nodes, const WhitenReport& report,
                                       ImportanceScale scale = ImportanceScale::normalized);

}  // namespace mvw
