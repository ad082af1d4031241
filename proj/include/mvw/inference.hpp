#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mvw/icm_engine.hpp"
#include "mvw/metrics.hpp"
#include "mvw/model.hpp"
#include "mvw/rng.hpp"

namespace mvw {

/// Draw u and every z_v by sequential CRP seating, y_v = all ones, and T the
/// largest grid value not above max(2p, t_ori).
ModelState init_state(const Dataset& data, const Hyperparams& hyper, Rng& rng);

/// Sequential CRP seating of m elements.
std::vector<int> sample_crp(int m, double alpha, Rng& rng);

struct SweepOutcome {
  ModelState state;
  double log_posterior = 0.0;
};

SweepOutcome icm_sweep(const Dataset& data, const ModelState& state, const Hyperparams& hyper, Rng& rng,
                       const MoveObserver* observer = nullptr);

/// Sweeps one initialization seeded by `seed` until it stabilizes.
FitResult icm_fit(const Dataset& data, const Hyperparams& hyper, std::uint64_t seed);
FitResult icm_fit(const PosteriorContext& ctx, std::uint64_t seed, const MoveObserver* observer = nullptr);

/// Invoked from worker threads; must be thread-safe.
using ProgressHook = std::function<void(int restart, int iteration, double log_posterior)>;

/// hyper.restarts independent fits with seeds derive_seed(hyper.seed, j),
/// spread over hyper.workers threads. Sorted by log posterior, descending
/// (restart index breaks ties), so the output does not depend on workers.
std::vector<FitResult> run_restarts(const Dataset& data, const Hyperparams& hyper,
                                    const ProgressHook& progress = {});

struct StableSelection {
  FitResult model;
  int rank = 0;          // position of the chosen model in the input
  int partner_rank = 0;  // the other member of the best-agreeing pair
  double pair_ari = 1.0;
  bool fallback = false;  // fewer than two results: best returned as is
  ViewStability stability;
};

/// Among the top_n fits, take the pair whose view memberships agree best
/// (ARI) and return its higher-posterior member. Stability of the chosen
/// model's views is measured by Dice against the other top `probe` fits.
StableSelection select_stable_model(std::span<const FitResult> results, int top_n = 5, int probe = 30,
                                    int n_perm = 0, std::uint64_t seed = 0);

}  // namespace mvw
