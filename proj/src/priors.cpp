#include "mvw/priors.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "mvw/errors.hpp"
#include "mvw/labels.hpp"
#include "mvw/wishart.hpp"

namespace mvw {

double crp_log_normalizer(int m, double alpha) {
  return log_gamma(double(m) + alpha) - log_gamma(alpha);
}

double crp_log_prob_sizes(std::span<const int> sizes, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("crp: alpha must be positive");
  if (sizes.empty()) throw std::invalid_argument("crp: empty partition");
  int m = 0;
  double out = 0.0;
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("crp: empty block in partition");
    m += s;
    out += log_gamma(double(s));
  }
  out += double(sizes.size()) * std::log(alpha);
  return out - crp_log_normalizer(m, alpha);
}

double crp_log_prob(std::span<const int> labels, double alpha) {
  if (labels.empty()) throw std::invalid_argument("crp: empty label set");
  if (!is_dense(labels)) throw std::invalid_argument("crp: labels are not dense");
  const auto sizes = block_sizes(labels);
  return crp_log_prob_sizes(sizes, alpha);
}

namespace {

// Restricted growth strings enumerate every set partition exactly once.
void enumerate_partitions(std::vector<int>& labels, int pos, int max_label, double alpha,
                          double& total) {
  if (pos == static_cast<int>(labels.size())) {
    total += std::exp(crp_log_prob(labels, alpha));
    return;
  }
  for (int l = 0; l <= max_label + 1; ++l) {
    labels[static_cast<std::size_t>(pos)] = l;
    enumerate_partitions(labels, pos + 1, std::max(max_label, l), alpha, total);
  }
}

}  // namespace

double crp_enumerate_check(int m, double alpha) {
  if (m < 1 || m > 8) throw std::invalid_argument("crp_enumerate_check: m must be in 1..8");
  std::vector<int> labels(static_cast<std::size_t>(m), 0);
  double total = 0.0;
  enumerate_partitions(labels, 1, 0, alpha, total);
  return total;
}

bool DofGrid::contains(int t) const {
  return std::binary_search(values.begin(), values.end(), t);
}

int DofGrid::snap_down(int bound) const {
  auto it = std::upper_bound(values.begin(), values.end(), bound);
  if (it == values.begin()) return values.front();
  return *std::prev(it);
}

DofGrid dof_grid(int p, int t_ori, int delta) {
  if (p < 1) throw std::invalid_argument("dof_grid: p must be >= 1");
  if (t_ori < 1) throw std::invalid_argument("dof_grid: t_ori must be >= 1");
  if (delta < 1) throw std::invalid_argument("dof_grid: delta must be >= 1");
  DofGrid grid;
  grid.upper = std::max(2 * p, t_ori);
  for (int t = p + 5; t <= grid.upper; t += delta) grid.values.push_back(t);
  if (grid.values.empty()) {
    throw EmptyDofGrid("dof_grid: empty degree-of-freedom grid (p + 5 = " + std::to_string(p + 5) +
                       " exceeds max(2p, t_ori) = " + std::to_string(grid.upper) +
                       "); the series is too short for this node count");
  }
  return grid;
}

}  // namespace mvw
