#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace mvw {

/// log CRP(labels | alpha) = K log a + sum_k log (N_k - 1)! - sum_{j=1..m} log(j - 1 + a).
/// Labels must be dense and 0-based.
double crp_log_prob(std::span<const int> labels, double alpha);

/// Same quantity from block sizes; element count is the sum of the sizes.
double crp_log_prob_sizes(std::span<const int> sizes, double alpha);

/// log of the CRP normalizer prod_{j=1..m} (j - 1 + alpha).
double crp_log_normalizer(int m, double alpha);

/// Sum of exp(crp_log_prob) over every set partition of m <= 8 elements.
double crp_enumerate_check(int m, double alpha);

/// Uniform categorical prior over T_k = p + 5 + (k - 1) delta, T_q <= max(2p, t_ori).
struct DofGrid {
  std::vector<int> values;

  int size() const { return static_cast<int>(values.size()); }
  double prob() const { return 1.0 / static_cast<double>(values.size()); }
  double log_prob() const { return -std::log(static_cast<double>(values.size())); }
  bool contains(int t) const;
  /// Largest grid value <= bound, or the smallest value if none is.
  int snap_down(int bound) const;
  int upper_bound() const { return upper; }

  int upper = 0;
};

DofGrid dof_grid(int p, int t_ori, int delta = 3);

}  // namespace mvw
