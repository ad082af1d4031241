#include "mvw/inference.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "mvw/priors.hpp"

namespace mvw {

std::vector<int> sample_crp(int m, double alpha, Rng& rng) {
  std::vector<int> labels;
  std::vector<int> sizes;
  labels.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double r = rng.uniform() * (double(i) + alpha);
    int chosen = static_cast<int>(sizes.size());
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      r -= double(sizes[k]);
      if (r < 0.0) {
        chosen = static_cast<int>(k);
        break;
      }
    }
    if (chosen == static_cast<int>(sizes.size())) sizes.push_back(0);
    ++sizes[static_cast<std::size_t>(chosen)];
    labels.push_back(chosen);
  }
  return labels;
}

ModelState init_state(const Dataset& data, const Hyperparams& hyper, Rng& rng) {
  const int p = data.p();
  const int n = data.n();
  const DofGrid grid = dof_grid(p, data.t_ori, hyper.delta);
  ModelState state;
  state.u = sample_crp(p, hyper.alpha_view, rng);
  const int views = *std::max_element(state.u.begin(), state.u.end()) + 1;
  for (int v = 0; v < views; ++v) {
    const auto count = std::count(state.u.begin(), state.u.end(), v);
    state.y.emplace_back(static_cast<std::size_t>(count), 0);
    state.z.push_back(sample_crp(n, hyper.alpha_object, rng));
  }
  state.dof = grid.snap_down(grid.upper_bound());
  return canonical_state(state);
}

SweepOutcome icm_sweep(const Dataset& data, const ModelState& state, const Hyperparams& hyper, Rng& rng,
                       const MoveObserver* observer) {
  const PosteriorContext ctx(data, hyper);
  IcmEngine engine(ctx, state);
  const double lp = engine.sweep(rng, observer);
  return {engine.state(), lp};
}

FitResult icm_fit(const PosteriorContext& ctx, std::uint64_t seed, const MoveObserver* observer) {
  const Hyperparams& hyper = ctx.hyper();
  Rng rng(seed);
  IcmEngine engine(ctx, init_state(ctx.data(), hyper, rng));

  FitResult result;
  result.seed = seed;
  // Random initial clusters carry almost no correlation signal, and judging
  // node clusters against them splits every view into singletons. One object
  // pass first lets each view's clusters pick up structure.
  if (hyper.warm_start && hyper.max_iter > 0) engine.object_pass(rng, observer);
  double previous = engine.log_posterior();
  int iteration = 0;
  int stable = 0;
  while (iteration < hyper.max_iter && stable < hyper.max_stability) {
    const double current = engine.sweep(rng, observer);
    result.diagnostics.log_posterior_trace.push_back(current);
    if (current - previous < hyper.epsilon) {
      ++stable;
    } else {
      stable = 0;
    }
    previous = current;
    ++iteration;
  }
  result.state = engine.state();
  result.log_posterior = engine.log_posterior();
  result.iterations = iteration;
  result.converged = stable >= hyper.max_stability;
  result.diagnostics.moves_accepted = engine.moves_accepted();
  return result;
}

FitResult icm_fit(const Dataset& data, const Hyperparams& hyper, std::uint64_t seed) {
  const PosteriorContext ctx(data, hyper);
  return icm_fit(ctx, seed);
}

std::vector<FitResult> run_restarts(const Dataset& data, const Hyperparams& hyper, const ProgressHook& progress) {
  const PosteriorContext ctx(data, hyper);
  const int restarts = hyper.restarts;
  std::vector<FitResult> results(static_cast<std::size_t>(restarts));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const int j = next.fetch_add(1);
      if (j >= restarts) return;
      try {
        FitResult r = icm_fit(ctx, derive_seed(hyper.seed, static_cast<std::uint64_t>(j)));
        r.restart = j;
        if (progress) progress(j, r.iterations, r.log_posterior);
        results[static_cast<std::size_t>(j)] = std::move(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = restarts;
      }
    }
  };

  const int workers = std::clamp(hyper.workers, 1, restarts);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::stable_sort(results.begin(), results.end(), [](const FitResult& x, const FitResult& y) {
    if (x.log_posterior != y.log_posterior) return x.log_posterior > y.log_posterior;
    return x.restart < y.restart;
  });
  return results;
}

StableSelection select_stable_model(std::span<const FitResult> results, int top_n, int probe, int n_perm,
                                    std::uint64_t seed) {
  if (results.empty()) throw std::invalid_argument("select_stable_model: no results");
  StableSelection sel;
  const int top = std::min<int>(top_n, static_cast<int>(results.size()));
  if (top < 2) {
    sel.model = results.front();
    sel.fallback = true;
  } else {
    double best = -2.0;
    int bi = 0, bj = 1;
    for (int i = 0; i < top; ++i) {
      for (int j = i + 1; j < top; ++j) {
        const double ari = adjusted_rand_index(results[static_cast<std::size_t>(i)].state.u,
                                               results[static_cast<std::size_t>(j)].state.u);
        if (ari > best) {
          best = ari;
          bi = i;
          bj = j;
        }
      }
    }
    // Input is sorted by posterior, so the lower rank has the larger L.
    const auto& x = results[static_cast<std::size_t>(bi)];
    const auto& y = results[static_cast<std::size_t>(bj)];
    const bool first = x.log_posterior >= y.log_posterior;
    sel.model = first ? x : y;
    sel.rank = first ? bi : bj;
    sel.partner_rank = first ? bj : bi;
    sel.pair_ari = best;
  }

  std::vector<std::vector<int>> others;
  const int probe_count = std::min<int>(probe, static_cast<int>(results.size()));
  for (int r = 0; r < probe_count; ++r) {
    if (r == sel.rank) continue;
    others.push_back(results[static_cast<std::size_t>(r)].state.u);
  }
  Rng rng(seed);
  sel.stability = view_stability(sel.model.state.u, others, n_perm, rng);
  return sel;
}

}  // namespace mvw
