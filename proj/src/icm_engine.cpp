#include "mvw/icm_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mvw/errors.hpp"
#include "mvw/labels.hpp"
#include "mvw/linalg.hpp"
#include "mvw/wishart.hpp"

namespace mvw {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void insert_sorted(std::vector<int>& v, int x) { v.insert(std::upper_bound(v.begin(), v.end(), x), x); }

void erase_value(std::vector<int>& v, int x) { v.erase(std::find(v.begin(), v.end(), x)); }

std::vector<int> group_sizes(const std::vector<std::vector<int>>& groups) {
  std::vector<int> sizes;
  sizes.reserve(groups.size() + 1);
  for (const auto& g : groups) sizes.push_back(static_cast<int>(g.size()));
  return sizes;
}

}  // namespace

// ---------------------------------------------------------------------------
// PosteriorContext

PosteriorContext::PosteriorContext(const Dataset& data, const Hyperparams& hyper)
    : data_(&data), hyper_(hyper), n_(data.n()), p_(data.p()) {
  hyper_.validate();
  if (n_ < 1 || p_ < 1) throw std::invalid_argument("dataset is empty");
  grid_ = dof_grid(p_, data.t_ori, hyper_.delta);

  std::vector<double> log_dets;
  log_dets.reserve(static_cast<std::size_t>(n_));
  total_sum_ = Eigen::MatrixXd::Zero(p_, p_);
  for (int i = 0; i < n_; ++i) {
    const auto& m = data.matrices[static_cast<std::size_t>(i)];
    if (m.rows() != p_ || m.cols() != p_) throw DimensionMismatch("dataset matrices differ in size");
    log_dets.push_back(log_det_spd(m, ("matrix " + data.subject_id(i)).c_str()));
    total_sum_ += m;
  }
  for (int t : grid_.values) {
    double acc = 0.0;
    for (double ld : log_dets) acc += log_wishart_constant(ld, double(t), p_);
    log_constant_.push_back(acc);
  }

  // log Gamma_d((d + 3 + cT) / 2) telescopes into differences of
  // H(x) = sum_{m=1..x} log Gamma(m / 2), so every block constant is O(1).
  const int t_max = grid_.values.back();
  const std::size_t h_len = static_cast<std::size_t>(n_) * static_cast<std::size_t>(t_max) +
                            static_cast<std::size_t>(p_) + 4;
  half_lgamma_prefix_.assign(h_len + 1, 0.0);
  for (std::size_t m = 1; m <= h_len; ++m) {
    half_lgamma_prefix_[m] = half_lgamma_prefix_[m - 1] + log_gamma(0.5 * double(m));
  }

  const int lg_len = std::max(n_, p_) + 2;
  log_gamma_int_.assign(static_cast<std::size_t>(lg_len), 0.0);
  for (int k = 1; k < lg_len; ++k) log_gamma_int_[static_cast<std::size_t>(k)] = log_gamma(double(k));
}

double PosteriorContext::block_const(int t, int count, int dim) const {
  const int dof = grid_.values[static_cast<std::size_t>(t)];
  const double nu = double(dim + 3);
  const std::size_t ct = static_cast<std::size_t>(count) * static_cast<std::size_t>(dof);
  const auto h = [this](std::size_t x) { return half_lgamma_prefix_[x]; };
  const double lmg_post = h(ct + static_cast<std::size_t>(dim) + 3) - h(ct + 3);
  const double lmg_prior = h(static_cast<std::size_t>(dim) + 3) - h(3);
  // The pi^{d(d-1)/4} factors of the two multigamma terms cancel.
  return 0.5 * nu * double(dim) * std::log(2.0 / double(dof)) +
         0.5 * double(ct) * double(dim) * std::numbers::ln2 + lmg_post - lmg_prior;
}

double PosteriorContext::crp_from_sizes(const std::vector<int>& sizes, double alpha) const {
  int m = 0;
  double out = double(sizes.size()) * std::log(alpha);
  for (int s : sizes) {
    m += s;
    out += log_gamma_int(s);
  }
  return out - (log_gamma(double(m) + alpha) - log_gamma(alpha));
}

// ---------------------------------------------------------------------------
// IcmEngine

int IcmEngine::View::node_count() const {
  int c = 0;
  for (const auto& g : groups) c += static_cast<int>(g.size());
  return c;
}

IcmEngine::IcmEngine(const PosteriorContext& ctx, const ModelState& state) : ctx_(&ctx) {
  const int n = ctx.n();
  const int p = ctx.p();
  validate_state(state, n, p);
  const auto& grid = ctx.grid().values;
  auto it = std::find(grid.begin(), grid.end(), state.dof);
  if (it == grid.end()) {
    throw std::invalid_argument("degree of freedom " + std::to_string(state.dof) + " is not on the prior grid");
  }
  t_index_ = static_cast<int>(it - grid.begin());

  view_of_ = state.u;
  group_of_.assign(static_cast<std::size_t>(p), 0);
  scratch_.resize(static_cast<std::size_t>(p) * static_cast<std::size_t>(p));
  idx_.reserve(static_cast<std::size_t>(p));

  for (int v = 0; v < state.view_count(); ++v) {
    View view;
    const auto nodes = state.view_nodes(v);
    const auto& yv = state.y[static_cast<std::size_t>(v)];
    view.groups.resize(static_cast<std::size_t>(label_count(yv)));
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      view.groups[static_cast<std::size_t>(yv[a])].push_back(nodes[a]);
      group_of_[static_cast<std::size_t>(nodes[a])] = yv[a];
    }
    view.z = state.z[static_cast<std::size_t>(v)];
    views_.push_back(std::move(view));
  }
  resync();
}

void IcmEngine::resync() {
  const int n = ctx_->n();
  const int p = ctx_->p();
  for (std::size_t v = 0; v < views_.size(); ++v) {
    View& view = views_[v];
    const int k_count = label_count(view.z);
    view.cluster_size.assign(static_cast<std::size_t>(k_count), 0);
    view.sums.assign(static_cast<std::size_t>(k_count), Eigen::MatrixXd::Zero(p, p));
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(view.z[static_cast<std::size_t>(i)]);
      ++view.cluster_size[k];
      view.sums[k] += ctx_->matrix(i);
    }
    view.block.assign(static_cast<std::size_t>(k_count), std::vector<double>(view.groups.size(), 0.0));
    for (std::size_t g = 0; g < view.groups.size(); ++g) refresh_group(static_cast<int>(v), static_cast<int>(g));
  }
}

double IcmEngine::eval_block(const Eigen::MatrixXd& sum, int count, const std::vector<int>& nodes, int extra,
                             const Eigen::MatrixXd* delta, double sign, int t) const {
  if (count == 0) return 0.0;
  idx_.assign(nodes.begin(), nodes.end());
  if (extra >= 0) idx_.push_back(extra);
  const int d = static_cast<int>(idx_.size());
  if (d == 0) return 0.0;
  const double diag = ctx_->prior_diag(t);
  double* buf = scratch_.data();
  // Upper triangle only: column b, rows a <= b.
  for (int b = 0; b < d; ++b) {
    const Eigen::Index jb = idx_[static_cast<std::size_t>(b)];
    const double* sum_col = sum.data() + jb * sum.rows();
    double* out = buf + static_cast<std::ptrdiff_t>(b) * d;
    if (delta != nullptr) {
      const double* delta_col = delta->data() + jb * delta->rows();
      for (int a = 0; a <= b; ++a) {
        const Eigen::Index ia = idx_[static_cast<std::size_t>(a)];
        out[a] = sum_col[ia] + sign * delta_col[ia];
      }
    } else {
      for (int a = 0; a <= b; ++a) out[a] = sum_col[idx_[static_cast<std::size_t>(a)]];
    }
    out[b] += diag;
  }
  const double log_det = log_det_spd_inplace(buf, d, d);
  if (std::isnan(log_det)) throw NotPositiveDefinite("S + block sum is not positive definite");
  return ctx_->block_from_logdet(t, count, d, log_det);
}

double IcmEngine::crp_view_term() const {
  std::vector<int> sizes;
  sizes.reserve(views_.size());
  for (const auto& v : views_) sizes.push_back(v.node_count());
  return ctx_->crp_from_sizes(sizes, ctx_->hyper().alpha_view);
}

double IcmEngine::crp_node_term(const View& view) const {
  return ctx_->crp_from_sizes(group_sizes(view.groups), ctx_->hyper().alpha_node);
}

double IcmEngine::crp_object_term(const View& view) const {
  return ctx_->crp_from_sizes(view.cluster_size, ctx_->hyper().alpha_object);
}

double IcmEngine::view_score(const View& view) const {
  double s = crp_node_term(view) + crp_object_term(view);
  for (const auto& row : view.block) {
    for (double b : row) s += b;
  }
  return s;
}

double IcmEngine::log_posterior() const {
  double total = ctx_->log_constant(t_index_) + crp_view_term() + ctx_->grid().log_prob();
  for (const auto& v : views_) total += view_score(v);
  return total;
}

void IcmEngine::refresh_group(int v, int g) {
  View& view = views_[static_cast<std::size_t>(v)];
  const auto& nodes = view.groups[static_cast<std::size_t>(g)];
  for (std::size_t k = 0; k < view.sums.size(); ++k) {
    view.block[k][static_cast<std::size_t>(g)] =
        eval_block(view.sums[k], view.cluster_size[k], nodes, -1, nullptr, 0.0, t_index_);
  }
}

void IcmEngine::refresh_cluster(int v, int k) {
  View& view = views_[static_cast<std::size_t>(v)];
  for (std::size_t g = 0; g < view.groups.size(); ++g) {
    view.block[static_cast<std::size_t>(k)][g] = eval_block(view.sums[static_cast<std::size_t>(k)],
                                                            view.cluster_size[static_cast<std::size_t>(k)],
                                                            view.groups[g], -1, nullptr, 0.0, t_index_);
  }
}

void IcmEngine::remove_empty_group(int v, int g) {
  View& view = views_[static_cast<std::size_t>(v)];
  view.groups.erase(view.groups.begin() + g);
  for (auto& row : view.block) row.erase(row.begin() + g);
  for (std::size_t h = static_cast<std::size_t>(g); h < view.groups.size(); ++h) {
    for (int node : view.groups[h]) group_of_[static_cast<std::size_t>(node)] = static_cast<int>(h);
  }
}

void IcmEngine::remove_empty_view(int v) {
  views_.erase(views_.begin() + v);
  for (auto& label : view_of_) {
    if (label > v) --label;
  }
}

// Detaches node from its group (and view); returns true if its view vanished.
bool IcmEngine::detach_node(int node) {
  const int a = view_of_[static_cast<std::size_t>(node)];
  const int g = group_of_[static_cast<std::size_t>(node)];
  View& view = views_[static_cast<std::size_t>(a)];
  erase_value(view.groups[static_cast<std::size_t>(g)], node);
  if (view.groups[static_cast<std::size_t>(g)].empty()) {
    remove_empty_group(a, g);
    if (view.groups.empty()) {
      remove_empty_view(a);
      return true;
    }
  } else {
    refresh_group(a, g);
  }
  return false;
}

bool IcmEngine::update_view(int node) {
  const int a = view_of_[static_cast<std::size_t>(node)];
  const int g = group_of_[static_cast<std::size_t>(node)];
  const View& src = views_[static_cast<std::size_t>(a)];
  const int t = t_index_;
  const int n = ctx_->n();
  const double alpha_node = ctx_->hyper().alpha_node;
  const double alpha_object = ctx_->hyper().alpha_object;
  const bool alone_in_view = src.node_count() == 1;

  std::vector<int> view_sizes;
  for (const auto& v : views_) view_sizes.push_back(v.node_count());
  const double crp_u_before = ctx_->crp_from_sizes(view_sizes, ctx_->hyper().alpha_view);

  // Change from taking the node out of its view.
  double removal = 0.0;
  if (alone_in_view) {
    removal = -view_score(src);
  } else {
    std::vector<int> rest = src.groups[static_cast<std::size_t>(g)];
    erase_value(rest, node);
    auto sizes = group_sizes(src.groups);
    for (std::size_t k = 0; k < src.sums.size(); ++k) {
      const double after = rest.empty() ? 0.0 : eval_block(src.sums[k], src.cluster_size[k], rest, -1, nullptr, 0.0, t);
      removal += after - src.block[k][static_cast<std::size_t>(g)];
    }
    if (rest.empty()) {
      sizes.erase(sizes.begin() + g);
    } else {
      --sizes[static_cast<std::size_t>(g)];
    }
    removal += ctx_->crp_from_sizes(sizes, alpha_node) - crp_node_term(src);
  }

  auto crp_u_after = [&](int target) {
    std::vector<int> sizes = view_sizes;
    --sizes[static_cast<std::size_t>(a)];
    if (target >= 0) {
      ++sizes[static_cast<std::size_t>(target)];
    } else {
      sizes.push_back(1);
    }
    if (sizes[static_cast<std::size_t>(a)] == 0) sizes.erase(sizes.begin() + a);
    return ctx_->crp_from_sizes(sizes, ctx_->hyper().alpha_view);
  };

  double best = 0.0;
  int best_view = a;
  int best_group = g;  // -1: fresh group in view; best_view -1: fresh view

  const std::vector<int> none;
  for (int b = 0; b < static_cast<int>(views_.size()); ++b) {
    if (b == a) continue;
    const View& dst = views_[static_cast<std::size_t>(b)];
    const double crp_u = crp_u_after(b) - crp_u_before;
    const double crp_y_before = crp_node_term(dst);
    auto sizes = group_sizes(dst.groups);
    for (int h = 0; h <= static_cast<int>(dst.groups.size()); ++h) {
      const bool fresh = h == static_cast<int>(dst.groups.size());
      const std::vector<int>& members = fresh ? none : dst.groups[static_cast<std::size_t>(h)];
      double gain = 0.0;
      for (std::size_t k = 0; k < dst.sums.size(); ++k) {
        gain += eval_block(dst.sums[k], dst.cluster_size[k], members, node, nullptr, 0.0, t);
        if (!fresh) gain -= dst.block[k][static_cast<std::size_t>(h)];
      }
      if (fresh) {
        sizes.push_back(1);
      } else {
        ++sizes[static_cast<std::size_t>(h)];
      }
      gain += ctx_->crp_from_sizes(sizes, alpha_node) - crp_y_before;
      if (fresh) {
        sizes.pop_back();
      } else {
        --sizes[static_cast<std::size_t>(h)];
      }
      const double delta = removal + gain + crp_u;
      if (delta > best + kMoveTolerance) {
        best = delta;
        best_view = b;
        best_group = fresh ? -1 : h;
      }
    }
  }

  // Fresh view: one node cluster, every object in one cluster. Identical to
  // staying put when the node already sits alone in a single-cluster view.
  if (!(alone_in_view && src.cluster_size.size() == 1)) {
    const std::vector<int> obj_sizes{n};
    const double gain = eval_block(ctx_->total_sum(), n, none, node, nullptr, 0.0, t) +
                        ctx_->crp_from_sizes(obj_sizes, alpha_object) +
                        ctx_->crp_from_sizes(std::vector<int>{1}, alpha_node);
    const double delta = removal + gain + crp_u_after(-1) - crp_u_before;
    if (delta > best + kMoveTolerance) {
      best = delta;
      best_view = -1;
      best_group = -1;
    }
  }

  if (best_view == a) return false;

  const bool vanished = detach_node(node);
  if (vanished && best_view > a) --best_view;
  if (best_view < 0) {
    View view;
    view.groups = {{node}};
    view.z.assign(static_cast<std::size_t>(n), 0);
    view.cluster_size = {n};
    view.sums = {ctx_->total_sum()};
    view.block = {{0.0}};
    views_.push_back(std::move(view));
    best_view = static_cast<int>(views_.size()) - 1;
    best_group = 0;
  } else {
    View& dst = views_[static_cast<std::size_t>(best_view)];
    if (best_group < 0) {
      dst.groups.push_back({node});
      for (auto& row : dst.block) row.push_back(0.0);
      best_group = static_cast<int>(dst.groups.size()) - 1;
    } else {
      insert_sorted(dst.groups[static_cast<std::size_t>(best_group)], node);
    }
  }
  view_of_[static_cast<std::size_t>(node)] = best_view;
  group_of_[static_cast<std::size_t>(node)] = best_group;
  refresh_group(best_view, best_group);
  ++moves_[static_cast<std::size_t>(MoveKind::view)];
  return true;
}

bool IcmEngine::update_node_cluster(int node) {
  const int a = view_of_[static_cast<std::size_t>(node)];
  const int g = group_of_[static_cast<std::size_t>(node)];
  View& view = views_[static_cast<std::size_t>(a)];
  const int t = t_index_;
  const double alpha_node = ctx_->hyper().alpha_node;
  const bool alone = view.groups[static_cast<std::size_t>(g)].size() == 1;
  if (alone && view.groups.size() == 1) return false;

  std::vector<int> rest = view.groups[static_cast<std::size_t>(g)];
  erase_value(rest, node);
  double removal = 0.0;
  for (std::size_t k = 0; k < view.sums.size(); ++k) {
    const double after = rest.empty() ? 0.0 : eval_block(view.sums[k], view.cluster_size[k], rest, -1, nullptr, 0.0, t);
    removal += after - view.block[k][static_cast<std::size_t>(g)];
  }
  const double crp_before = crp_node_term(view);
  const auto base_sizes = group_sizes(view.groups);

  // Sizes after the move; the vacated group is dropped when it empties.
  auto crp_after = [&](int target) {
    std::vector<int> sizes = base_sizes;
    --sizes[static_cast<std::size_t>(g)];
    if (target >= 0) {
      ++sizes[static_cast<std::size_t>(target)];
    } else {
      sizes.push_back(1);
    }
    if (sizes[static_cast<std::size_t>(g)] == 0) sizes.erase(sizes.begin() + g);
    return ctx_->crp_from_sizes(sizes, alpha_node);
  };

  double best = 0.0;
  int best_group = g;
  const std::vector<int> none;
  for (int h = 0; h <= static_cast<int>(view.groups.size()); ++h) {
    if (h == g) continue;
    const bool fresh = h == static_cast<int>(view.groups.size());
    if (fresh && alone) continue;
    const std::vector<int>& members = fresh ? none : view.groups[static_cast<std::size_t>(h)];
    double gain = 0.0;
    for (std::size_t k = 0; k < view.sums.size(); ++k) {
      gain += eval_block(view.sums[k], view.cluster_size[k], members, node, nullptr, 0.0, t);
      if (!fresh) gain -= view.block[k][static_cast<std::size_t>(h)];
    }
    const double delta = removal + gain + crp_after(fresh ? -1 : h) - crp_before;
    if (delta > best + kMoveTolerance) {
      best = delta;
      best_group = fresh ? -1 : h;
    }
  }
  if (best_group == g) return false;

  erase_value(view.groups[static_cast<std::size_t>(g)], node);
  if (best_group < 0) {
    view.groups.push_back({node});
    for (auto& row : view.block) row.push_back(0.0);
    best_group = static_cast<int>(view.groups.size()) - 1;
  } else {
    insert_sorted(view.groups[static_cast<std::size_t>(best_group)], node);
  }
  group_of_[static_cast<std::size_t>(node)] = best_group;
  refresh_group(a, best_group);
  if (view.groups[static_cast<std::size_t>(g)].empty()) {
    remove_empty_group(a, g);
  } else {
    refresh_group(a, g);
  }
  ++moves_[static_cast<std::size_t>(MoveKind::node_cluster)];
  return true;
}

bool IcmEngine::update_object_cluster(int v, int object) {
  View& view = views_[static_cast<std::size_t>(v)];
  const int k = view.z[static_cast<std::size_t>(object)];
  const auto ku = static_cast<std::size_t>(k);
  const int t = t_index_;
  const double alpha_object = ctx_->hyper().alpha_object;
  const bool alone = view.cluster_size[ku] == 1;
  if (alone && view.cluster_size.size() == 1) return false;
  const Eigen::MatrixXd& m = ctx_->matrix(object);

  double removal = 0.0;
  for (std::size_t g = 0; g < view.groups.size(); ++g) {
    removal += eval_block(view.sums[ku], view.cluster_size[ku] - 1, view.groups[g], -1, &m, -1.0, t) -
               view.block[ku][g];
  }
  const double crp_before = crp_object_term(view);

  auto crp_after = [&](int target) {
    std::vector<int> sizes = view.cluster_size;
    --sizes[ku];
    if (target >= 0) {
      ++sizes[static_cast<std::size_t>(target)];
    } else {
      sizes.push_back(1);
    }
    if (sizes[ku] == 0) sizes.erase(sizes.begin() + k);
    return ctx_->crp_from_sizes(sizes, alpha_object);
  };

  double best = 0.0;
  int best_cluster = k;
  const int k_count = static_cast<int>(view.cluster_size.size());
  for (int l = 0; l <= k_count; ++l) {
    if (l == k) continue;
    const bool fresh = l == k_count;
    if (fresh && alone) continue;
    double gain = 0.0;
    for (std::size_t g = 0; g < view.groups.size(); ++g) {
      if (fresh) {
        gain += eval_block(m, 1, view.groups[g], -1, nullptr, 0.0, t);
      } else {
        const auto lu = static_cast<std::size_t>(l);
        gain += eval_block(view.sums[lu], view.cluster_size[lu] + 1, view.groups[g], -1, &m, 1.0, t) -
                view.block[lu][g];
      }
    }
    const double delta = removal + gain + crp_after(fresh ? -1 : l) - crp_before;
    if (delta > best + kMoveTolerance) {
      best = delta;
      best_cluster = fresh ? -1 : l;
    }
  }
  if (best_cluster == k) return false;

  if (best_cluster < 0) {
    view.sums.push_back(m);
    view.cluster_size.push_back(1);
    view.block.emplace_back(view.groups.size(), 0.0);
    best_cluster = k_count;
  } else {
    view.sums[static_cast<std::size_t>(best_cluster)] += m;
    ++view.cluster_size[static_cast<std::size_t>(best_cluster)];
  }
  view.z[static_cast<std::size_t>(object)] = best_cluster;
  refresh_cluster(v, best_cluster);

  view.sums[ku] -= m;
  --view.cluster_size[ku];
  if (view.cluster_size[ku] == 0) {
    view.sums.erase(view.sums.begin() + k);
    view.cluster_size.erase(view.cluster_size.begin() + k);
    view.block.erase(view.block.begin() + k);
    for (auto& label : view.z) {
      if (label > k) --label;
    }
  } else {
    refresh_cluster(v, k);
  }
  ++moves_[static_cast<std::size_t>(MoveKind::object_cluster)];
  return true;
}

bool IcmEngine::update_dof() {
  const int q = ctx_->grid().size();
  if (q == 1) return false;
  auto score = [&](int t) {
    double s = ctx_->log_constant(t);
    for (const auto& view : views_) {
      for (std::size_t k = 0; k < view.sums.size(); ++k) {
        for (const auto& nodes : view.groups) {
          s += eval_block(view.sums[k], view.cluster_size[k], nodes, -1, nullptr, 0.0, t);
        }
      }
    }
    return s;
  };
  const double current = score(t_index_);
  double best = current;
  int best_t = t_index_;
  for (int t = 0; t < q; ++t) {
    if (t == t_index_) continue;
    const double s = score(t);
    if (s > best + kMoveTolerance) {
      best = s;
      best_t = t;
    }
  }
  if (best_t == t_index_) return false;
  t_index_ = best_t;
  for (std::size_t v = 0; v < views_.size(); ++v) {
    for (std::size_t g = 0; g < views_[v].groups.size(); ++g) refresh_group(static_cast<int>(v), static_cast<int>(g));
  }
  ++moves_[static_cast<std::size_t>(MoveKind::dof)];
  return true;
}

void IcmEngine::object_pass(Rng& rng, const MoveObserver* observer) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(views_.size() * static_cast<std::size_t>(ctx_->n()));
  for (int v = 0; v < static_cast<int>(views_.size()); ++v) {
    for (int i = 0; i < ctx_->n(); ++i) pairs.emplace_back(v, i);
  }
  rng.shuffle(std::span<std::pair<int, int>>(pairs));
  for (const auto& [v, i] : pairs) {
    const bool moved = update_object_cluster(v, i);
    if (observer != nullptr && *observer) (*observer)(MoveKind::object_cluster, moved, *this);
  }
}

double IcmEngine::sweep(Rng& rng, const MoveObserver* observer) {
  resync();
  const int p = ctx_->p();
  auto notify = [&](MoveKind kind, bool moved) {
    if (observer != nullptr && *observer) (*observer)(kind, moved, *this);
  };

  std::vector<int> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<int>(order));
  for (int node : order) notify(MoveKind::view, update_view(node));

  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<int>(order));
  for (int node : order) notify(MoveKind::node_cluster, update_node_cluster(node));

  object_pass(rng, observer);

  notify(MoveKind::dof, update_dof());
  return log_posterior();
}

ModelState IcmEngine::state() const {
  ModelState s;
  s.u = view_of_;
  s.dof = ctx_->grid().values[static_cast<std::size_t>(t_index_)];
  for (std::size_t v = 0; v < views_.size(); ++v) {
    std::vector<int> yv;
    for (std::size_t node = 0; node < view_of_.size(); ++node) {
      if (view_of_[node] == static_cast<int>(v)) yv.push_back(group_of_[node]);
    }
    s.y.push_back(std::move(yv));
    s.z.push_back(views_[v].z);
  }
  return canonical_state(s);
}

}  // namespace mvw
