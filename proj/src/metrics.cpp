#include "mvw/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "mvw/errors.hpp"
#include "mvw/labels.hpp"
#include "mvw/wishart.hpp"

namespace mvw {

namespace {

long long choose2(long long x) { return x * (x - 1) / 2; }

}  // namespace

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw DimensionMismatch("adjusted_rand_index: label vectors differ in length");
  if (a.empty()) throw std::invalid_argument("adjusted_rand_index: empty labelings");
  const auto ca = canonicalize(a);
  const auto cb = canonicalize(b);
  if (ca == cb) return 1.0;

  std::map<std::pair<int, int>, long> table;
  std::vector<long> row(static_cast<std::size_t>(label_count(ca)), 0);
  std::vector<long> col(static_cast<std::size_t>(label_count(cb)), 0);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    ++table[{ca[i], cb[i]}];
    ++row[static_cast<std::size_t>(ca[i])];
    ++col[static_cast<std::size_t>(cb[i])];
  }
  // Pair counts are integers; scaling by the number of pairs keeps the
  // expected index integral too, so small cases come out exact.
  using Wide = __int128;
  long long index = 0, sum_a = 0, sum_b = 0;
  for (const auto& [key, count] : table) index += choose2(count);
  for (long r : row) sum_a += choose2(r);
  for (long c : col) sum_b += choose2(c);
  const Wide pairs = choose2(static_cast<long long>(ca.size()));
  const Wide product = Wide(sum_a) * Wide(sum_b);
  const Wide numerator = 2 * (Wide(index) * pairs - product);
  const Wide denominator = Wide(sum_a + sum_b) * pairs - 2 * product;
  if (denominator == 0) return 0.0;
  return static_cast<double>(static_cast<long double>(numerator) / static_cast<long double>(denominator));
}

double dice(std::span<const int> a, std::span<const int> b) {
  std::vector<int> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  sa.erase(std::unique(sa.begin(), sa.end()), sa.end());
  std::sort(sb.begin(), sb.end());
  sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::vector<int> common;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
  return 2.0 * double(common.size()) / double(sa.size() + sb.size());
}

RecoveryReport recovery_score(const GroundTruth& truth, const ModelState& fit) {
  if (truth.view_labels.size() != fit.u.size()) throw DimensionMismatch("recovery_score: node counts differ");
  RecoveryReport report;
  report.view_ari = adjusted_rand_index(truth.view_labels, fit.u);
  for (const auto& labels : truth.cluster_labels) {
    double best = -1.0;
    for (const auto& zv : fit.z) {
      if (zv.size() != labels.size()) throw DimensionMismatch("recovery_score: object counts differ");
      best = std::max(best, adjusted_rand_index(labels, zv));
    }
    report.cluster_ari_per_true_view.push_back(best);
  }
  if (!report.cluster_ari_per_true_view.empty()) {
    report.grand_mean_cluster_ari =
        std::accumulate(report.cluster_ari_per_true_view.begin(), report.cluster_ari_per_true_view.end(), 0.0) /
        double(report.cluster_ari_per_true_view.size());
  }
  return report;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = double(values.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - double(lo)) * (values[lo + 1] - values[lo]);
}

PermutationResult permutation_quantile(double observed, const LabelStatistic& stat, std::vector<int> labels,
                                       int n_perm, double q, Rng& rng) {
  if (n_perm < 1) throw std::invalid_argument("permutation_quantile: n_perm must be >= 1");
  std::vector<double> null;
  null.reserve(static_cast<std::size_t>(n_perm));
  int exceed = 0;
  for (int r = 0; r < n_perm; ++r) {
    rng.shuffle(std::span<int>(labels));
    const double s = stat(labels);
    if (s >= observed) ++exceed;
    null.push_back(s);
  }
  return {quantile(std::move(null), q), double(1 + exceed) / double(1 + n_perm)};
}

std::vector<double> fdr_adjust(std::span<const double> pvalues) {
  const std::size_t m = pvalues.size();
  for (double p : pvalues) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("fdr_adjust: p-value outside [0, 1]");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pvalues[x] < pvalues[y]; });
  std::vector<double> adjusted(m, 1.0);
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    const std::size_t i = order[r];
    running = std::min(running, pvalues[i] * (double(m) / double(r + 1)));
    adjusted[i] = std::min(running, 1.0);
  }
  return adjusted;
}

std::vector<ViewMatch> match_views_by_dice(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw DimensionMismatch("match_views_by_dice: node counts differ");
  const auto members_a = label_members(a);
  const auto members_b = label_members(b);
  struct Cand {
    double d;
    int i, j;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < members_a.size(); ++i) {
    for (std::size_t j = 0; j < members_b.size(); ++j) {
      cands.push_back({dice(members_a[i], members_b[j]), int(i), int(j)});
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.d > y.d; });
  std::vector<ViewMatch> out(members_a.size());
  std::vector<char> used_b(members_b.size(), 0);
  for (const auto& c : cands) {
    auto& slot = out[static_cast<std::size_t>(c.i)];
    if (slot.other >= 0 || used_b[static_cast<std::size_t>(c.j)]) continue;
    slot = {c.j, c.d};
    used_b[static_cast<std::size_t>(c.j)] = 1;
  }
  return out;
}

ViewStability view_stability(std::span<const int> reference, const std::vector<std::vector<int>>& others,
                             int n_perm, Rng& rng, double q) {
  const int views = label_count(reference);
  ViewStability out;
  out.dice.assign(static_cast<std::size_t>(views), {});
  for (const auto& other : others) {
    const auto m = match_views_by_dice(reference, other);
    for (int v = 0; v < views; ++v) out.dice[static_cast<std::size_t>(v)].push_back(m[static_cast<std::size_t>(v)].dice);
  }
  for (const auto& d : out.dice) {
    out.mean_dice.push_back(d.empty() ? 0.0 : std::accumulate(d.begin(), d.end(), 0.0) / double(d.size()));
  }
  if (n_perm > 0 && !others.empty()) {
    std::vector<std::vector<double>> null(static_cast<std::size_t>(views));
    for (const auto& other : others) {
      std::vector<int> shuffled = other;
      for (int r = 0; r < n_perm; ++r) {
        rng.shuffle(std::span<int>(shuffled));
        const auto m = match_views_by_dice(reference, shuffled);
        for (int v = 0; v < views; ++v) null[static_cast<std::size_t>(v)].push_back(m[static_cast<std::size_t>(v)].dice);
      }
    }
    for (auto& values : null) out.null_quantile.push_back(quantile(std::move(values), q));
  }
  return out;
}

MatchResult match_subjects(const Dataset& a, const Dataset& b, std::span<const int> node_subset, double dof) {
  if (node_subset.empty()) throw std::invalid_argument("match_subjects: empty node subset");
  if (a.n() < 1 || b.n() < 1) throw std::invalid_argument("match_subjects: empty dataset");
  if (a.p() != b.p()) throw DimensionMismatch("match_subjects: datasets differ in node count");
  for (int node : node_subset) {
    if (node < 0 || node >= a.p()) throw std::out_of_range("match_subjects: node index out of range");
  }
  const bool by_id = !a.subject_ids.empty() && !b.subject_ids.empty();
  std::unordered_map<std::string, int> index_of_a;
  if (by_id) {
    for (int i = 0; i < a.n(); ++i) index_of_a[a.subject_ids[static_cast<std::size_t>(i)]] = i;
  } else if (a.n() != b.n()) {
    throw DimensionMismatch("match_subjects: datasets without ids must have the same subjects");
  }

  const auto d = static_cast<Eigen::Index>(node_subset.size());
  auto restrict = [&](const Eigen::MatrixXd& m) {
    Eigen::MatrixXd r(d, d);
    for (Eigen::Index x = 0; x < d; ++x) {
      for (Eigen::Index y = 0; y < d; ++y) r(x, y) = m(node_subset[static_cast<std::size_t>(x)], node_subset[static_cast<std::size_t>(y)]);
    }
    return r;
  };
  std::vector<Eigen::MatrixXd> ra;
  for (const auto& m : a.matrices) ra.push_back(restrict(m));

  MatchResult result;
  int correct = 0;
  for (int j = 0; j < b.n(); ++j) {
    const Eigen::MatrixXd rb = restrict(b.matrices[static_cast<std::size_t>(j)]);
    double best = -std::numeric_limits<double>::infinity();
    int best_i = -1;
    bool tied = false;
    for (int i = 0; i < a.n(); ++i) {
      const double s = wishart_similarity(rb, ra[static_cast<std::size_t>(i)], dof);
      if (s > best) {
        best = s;
        best_i = i;
        tied = false;
      } else if (s == best) {
        tied = true;
      }
    }
    if (tied) ++result.ties;
    result.assignment.push_back(best_i);
    int truth = j;
    if (by_id) {
      auto it = index_of_a.find(b.subject_ids[static_cast<std::size_t>(j)]);
      if (it == index_of_a.end()) {
        throw std::invalid_argument("match_subjects: subject " + b.subject_ids[static_cast<std::size_t>(j)] +
                                    " is missing from the reference dataset");
      }
      truth = it->second;
    }
    if (best_i == truth) ++correct;
  }
  result.accuracy = double(correct) / double(b.n());
  return result;
}

}  // namespace mvw
