#include <algorithm>
#include <stdexcept>
#include <string>

#include "mvw/errors.hpp"
#include "mvw/labels.hpp"
#include "mvw/linalg.hpp"
#include "mvw/model.hpp"

namespace mvw {

void Dataset::validate() const {
  if (matrices.empty()) throw std::invalid_argument("dataset has no matrices");
  const Eigen::Index p = matrices.front().rows();
  if (p < 1) throw DimensionMismatch("dataset matrices are empty");
  if (!node_names.empty() && static_cast<Eigen::Index>(node_names.size()) != p) {
    throw DimensionMismatch("node_names length differs from p");
  }
  if (!subject_ids.empty() && subject_ids.size() != matrices.size()) {
    throw DimensionMismatch("subject_ids length differs from n");
  }
  if (t_ori < 1) throw std::invalid_argument("dataset t_ori must be >= 1");
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    const auto& m = matrices[i];
    const std::string who = "matrix " + subject_id(static_cast<int>(i));
    if (m.rows() != p || m.cols() != p) throw DimensionMismatch(who + " has the wrong dimension");
    if (!m.allFinite()) throw std::invalid_argument(who + " has non-finite entries");
    if (!is_symmetric(m, 1e-10)) throw std::invalid_argument(who + " is not symmetric");
    (void)cholesky_lower(m, who.c_str());
    if (kind == MatrixKind::correlation &&
        (m.diagonal().array() - 1.0).abs().maxCoeff() > 1e-8) {
      throw std::invalid_argument(who + " is declared a correlation matrix but has a non-unit diagonal");
    }
  }
}

std::string Dataset::subject_id(int i) const {
  if (i >= 0 && static_cast<std::size_t>(i) < subject_ids.size()) return subject_ids[static_cast<std::size_t>(i)];
  return std::to_string(i);
}

std::vector<int> ModelState::view_nodes(int v) const {
  std::vector<int> nodes;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == v) nodes.push_back(static_cast<int>(i));
  }
  return nodes;
}

ModelState canonical_state(const ModelState& state) {
  ModelState out;
  out.dof = state.dof;
  out.u = canonicalize(state.u);
  std::vector<int> old_of_new(static_cast<std::size_t>(label_count(out.u)), -1);
  for (std::size_t i = 0; i < state.u.size(); ++i) {
    old_of_new[static_cast<std::size_t>(out.u[i])] = state.u[i];
  }
  for (int old : old_of_new) {
    out.y.push_back(canonicalize(state.y.at(static_cast<std::size_t>(old))));
    out.z.push_back(canonicalize(state.z.at(static_cast<std::size_t>(old))));
  }
  return out;
}

void validate_state(const ModelState& state, int n, int p) {
  if (static_cast<int>(state.u.size()) != p) throw DimensionMismatch("state.u length differs from p");
  if (!is_dense(state.u)) throw std::invalid_argument("state.u labels are not dense");
  const int views = label_count(state.u);
  if (static_cast<int>(state.y.size()) != views || static_cast<int>(state.z.size()) != views) {
    throw DimensionMismatch("state.y / state.z must have one entry per view");
  }
  const auto sizes = block_sizes(state.u);
  for (int v = 0; v < views; ++v) {
    const auto& yv = state.y[static_cast<std::size_t>(v)];
    const auto& zv = state.z[static_cast<std::size_t>(v)];
    if (static_cast<int>(yv.size()) != sizes[static_cast<std::size_t>(v)]) {
      throw DimensionMismatch("state.y[" + std::to_string(v) + "] does not cover the nodes of its view");
    }
    if (!is_dense(yv)) throw std::invalid_argument("state.y labels are not dense");
    if (static_cast<int>(zv.size()) != n) throw DimensionMismatch("state.z length differs from n");
    if (!is_dense(zv)) throw std::invalid_argument("state.z labels are not dense");
  }
  if (state.dof < 1) throw std::invalid_argument("state degree of freedom must be positive");
}

void Hyperparams::validate() const {
  if (!(alpha_view > 0.0) || !(alpha_node > 0.0) || !(alpha_object > 0.0)) {
    throw std::invalid_argument("CRP concentration must be positive");
  }
  if (delta < 1) throw std::invalid_argument("delta must be >= 1");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (max_iter < 0) throw std::invalid_argument("max_iter must be >= 0");
  if (max_stability < 1) throw std::invalid_argument("max_stability must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

}  // namespace mvw
