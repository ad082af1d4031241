#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "mvw/model.hpp"
#include "mvw/rng.hpp"

namespace mvw {

/// Hubert-Arabie adjusted Rand index. Identical partitions give exactly 1;
/// otherwise a degenerate index (maximum equals expected) gives 0.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

/// 2|A n B| / (|A| + |B|) over index sets; two empty sets give 1.
double dice(std::span<const int> a, std::span<const int> b);

struct RecoveryReport {
  double view_ari = 0.0;
  std::vector<double> cluster_ari_per_true_view;
  double grand_mean_cluster_ari = 0.0;
};

/// View ARI plus, for every true view, the best ARI of its object labels
/// against any fitted view's object labels.
RecoveryReport recovery_score(const GroundTruth& truth, const ModelState& fit);

/// Type-7 (linear interpolation) sample quantile.
double quantile(std::vector<double> values, double q);

struct PermutationResult {
  double quantile = 0.0;
  double p_value = 1.0;
};

using LabelStatistic = std::function<double(std::span<const int>)>;

/// Null distribution of stat over uniform permutations of labels.
/// p = (1 + #{null >= observed}) / (1 + n_perm).
PermutationResult permutation_quantile(double observed, const LabelStatistic& stat, std::vector<int> labels,
                                       int n_perm, double q, Rng& rng);

/// Benjamini-Hochberg step-up adjusted p-values, in input order.
std::vector<double> fdr_adjust(std::span<const double> pvalues);

struct ViewMatch {
  int other = -1;  // matched view in the other labeling, -1 if none left
  double dice = 0.0;
};

/// Greedy one-to-one matching of the views of `a` to the views of `b` by
/// descending Dice of their node sets. Ties go to the lower (a, b) pair.
std::vector<ViewMatch> match_views_by_dice(std::span<const int> a, std::span<const int> b);

struct ViewStability {
  std::vector<std::vector<double>> dice;  // [view][probe model]
  std::vector<double> mean_dice;          // per view
  std::vector<double> null_quantile;      // per view, 0.95 permutation limit (empty if n_perm == 0)
};

/// Dice stability of every view of `reference` against each labeling in
/// `others`. The null permutes node labels of the other labelings.
ViewStability view_stability(std::span<const int> reference, const std::vector<std::vector<int>>& others,
                             int n_perm, Rng& rng, double q = 0.95);

struct MatchResult {
  double accuracy = 0.0;
  std::vector<int> assignment;  // for each subject of B, the index in A it matched
  int ties = 0;
};

/// For each subject b of B, argmax over a of wishart_similarity(B_b, A_a, T),
/// both restricted to node_subset. Subjects correspond by id when both datasets
/// carry ids, else by position. Ties go to the smallest index of A.
MatchResult match_subjects(const Dataset& a, const Dataset& b, std::span<const int> node_subset, double dof);

}  // namespace mvw
