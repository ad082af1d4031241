#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mvw {

enum class MatrixKind { covariance, correlation };

/// n symmetric positive-definite p x p matrices sharing one node set.
struct Dataset {
  std::vector<Eigen::MatrixXd> matrices;
  int t_ori = 0;
  MatrixKind kind = MatrixKind::correlation;
  std::vector<std::string> node_names;     // optional, length p when present
  std::vector<std::string> subject_ids;    // optional, length n when present

  int n() const { return static_cast<int>(matrices.size()); }
  int p() const { return matrices.empty() ? 0 : static_cast<int>(matrices.front().rows()); }

  /// Throws DimensionMismatch / NotPositiveDefinite / invalid_argument on a
  /// broken invariant (symmetry 1e-10, Cholesky, unit diagonal 1e-8).
  void validate() const;

  /// Subject id i, falling back to its index.
  std::string subject_id(int i) const;
};

/// Point estimate of every discrete structure. Labels are 0-based and dense.
///  u: view of each node (length p).
///  y[v]: node cluster of each node of view v, nodes taken in ascending index.
///  z[v]: object cluster of each object in view v (length n).
struct ModelState {
  std::vector<int> u;
  std::vector<std::vector<int>> y;
  std::vector<std::vector<int>> z;
  int dof = 0;

  int view_count() const { return static_cast<int>(z.size()); }
  /// Nodes of view v in ascending order.
  std::vector<int> view_nodes(int v) const;

  bool operator==(const ModelState&) const = default;
};

/// Relabel views, node clusters and object clusters by first occurrence.
ModelState canonical_state(const ModelState& state);

/// Throws if the state does not fit the data or breaks a density invariant.
void validate_state(const ModelState& state, int n, int p);

/// Planted structure of a synthetic dataset (0-based labels).
struct GroundTruth {
  std::vector<int> view_labels;                  // length p
  std::vector<std::vector<int>> cluster_labels;  // per true view, length n
};

struct Hyperparams {
  double alpha_view = 1.0;
  double alpha_node = 1.0;
  double alpha_object = 1.0;
  int delta = 3;
  int restarts = 1000;
  int max_iter = 500;
  int max_stability = 10;
  double epsilon = 1e-5;
  std::uint64_t seed = 0;
  int workers = 1;
  bool warm_start = true;  // one object-cluster pass before the first sweep

  void set_alpha(double a) { alpha_view = alpha_node = alpha_object = a; }
  void validate() const;
};

enum class MoveKind { view = 0, node_cluster = 1, object_cluster = 2, dof = 3 };

struct IcmDiagnostics {
  std::vector<double> log_posterior_trace;
  std::array<long, 4> moves_accepted{0, 0, 0, 0};
};

struct FitResult {
  ModelState state;
  double log_posterior = 0.0;
  std::uint64_t seed = 0;
  int restart = 0;
  int iterations = 0;
  bool converged = false;
  IcmDiagnostics diagnostics;
};

}  // namespace mvw
