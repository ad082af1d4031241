#pragma once

// Incremental evaluation of the collapsed log posterior for ICM.
//
// For every view v and object cluster k the engine keeps the full p x p sum
// F[v][k] = sum_{i : z_v(i) = k} M_i, so any block sum (a node subset of the
// view) is a principal submatrix of F. Block marginals are cached per
// (view, object cluster, node cluster) and candidate moves are scored by
// re-evaluating only the blocks they touch.

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "mvw/model.hpp"
#include "mvw/priors.hpp"
#include "mvw/rng.hpp"

namespace mvw {

/// Read-only tables shared by every restart on one dataset.
class PosteriorContext {
 public:
  PosteriorContext(const Dataset& data, const Hyperparams& hyper);

  const Dataset& data() const { return *data_; }
  const Hyperparams& hyper() const { return hyper_; }
  const DofGrid& grid() const { return grid_; }
  int n() const { return n_; }
  int p() const { return p_; }

  const Eigen::MatrixXd& matrix(int i) const { return data_->matrices[static_cast<std::size_t>(i)]; }
  const Eigen::MatrixXd& total_sum() const { return total_sum_; }

  /// sum_i log C_{M_i, T} for grid index t.
  double log_constant(int t) const { return log_constant_[static_cast<std::size_t>(t)]; }

  /// Block marginal given log|S + M_sum| for grid index t, count c, dimension d.
  double block_from_logdet(int t, int count, int dim, double log_det) const {
    const double post_half = 0.5 * (double(dim + 3) + double(count) * grid_.values[static_cast<std::size_t>(t)]);
    return block_const(t, count, dim) - post_half * log_det;
  }
  /// Everything in the block marginal except the log|S + M_sum| term.
  double block_const(int t, int count, int dim) const;
  double prior_diag(int t) const { return 2.0 / grid_.values[static_cast<std::size_t>(t)]; }

  /// log Gamma(k) for integer k in 1..max(n, p) + 1.
  double log_gamma_int(int k) const { return log_gamma_int_[static_cast<std::size_t>(k)]; }
  double crp_from_sizes(const std::vector<int>& sizes, double alpha) const;

 private:
  const Dataset* data_;
  Hyperparams hyper_;
  DofGrid grid_;
  int n_;
  int p_;
  Eigen::MatrixXd total_sum_;
  std::vector<double> log_constant_;
  std::vector<double> half_lgamma_prefix_;
  std::vector<double> log_gamma_int_;
};

class IcmEngine;

/// Called after every elementary update (moved or not).
using MoveObserver = std::function<void(MoveKind kind, bool moved, const IcmEngine& engine)>;

class IcmEngine {
 public:
  IcmEngine(const PosteriorContext& ctx, const ModelState& state);

  /// One ICM sweep: updates in the order view, node cluster,
  /// object cluster, degree of freedom. Returns the log posterior after.
  double sweep(Rng& rng, const MoveObserver* observer = nullptr);

  /// Every (view, object) pair once, in random order.
  void object_pass(Rng& rng, const MoveObserver* observer = nullptr);

  bool update_view(int node);
  bool update_node_cluster(int node);
  bool update_object_cluster(int view, int object);
  bool update_dof();

  /// Log posterior from the cached terms.
  double log_posterior() const;

  /// Canonical (first-occurrence) labeling of the current state.
  ModelState state() const;

  const std::array<long, 4>& moves_accepted() const { return moves_; }

  // Moves are accepted only when they improve by more than this.
  static constexpr double kMoveTolerance = 1e-10;

 private:
  struct View {
    std::vector<std::vector<int>> groups;  // node clusters: member nodes
    std::vector<int> z;                    // object cluster per object
    std::vector<int> cluster_size;
    std::vector<Eigen::MatrixXd> sums;     // F[k], p x p
    std::vector<std::vector<double>> block;  // block[k][g]

    int node_count() const;
  };

  // log marginal of the block on `nodes` (optionally plus `extra` node) using
  // sum F (+ sign * M) and count.
  double eval_block(const Eigen::MatrixXd& sum, int count, const std::vector<int>& nodes, int extra,
                    const Eigen::MatrixXd* delta, double sign, int t) const;
  double crp_view_term() const;
  double crp_node_term(const View& view) const;
  double crp_object_term(const View& view) const;
  double view_score(const View& view) const;

  void resync();
  void refresh_group(int v, int g);
  void refresh_cluster(int v, int k);
  bool detach_node(int node);
  void remove_empty_view(int v);
  void remove_empty_group(int v, int g);

  const PosteriorContext* ctx_;
  int t_index_ = 0;
  std::vector<View> views_;
  std::vector<int> view_of_;
  std::vector<int> group_of_;
  std::array<long, 4> moves_{0, 0, 0, 0};
  mutable std::vector<double> scratch_;
  mutable std::vector<int> idx_;
};

}  // namespace mvw
