#include "mvw/posterior.hpp"

#include <stdexcept>
#include <string>

#include "mvw/errors.hpp"
#include "mvw/labels.hpp"
#include "mvw/wishart.hpp"

namespace mvw {

PosteriorTerms log_posterior_terms(const Dataset& data, const ModelState& state, const Hyperparams& hyper) {
  const int n = data.n();
  const int p = data.p();
  validate_state(state, n, p);
  const DofGrid grid = dof_grid(p, data.t_ori, hyper.delta);
  if (!grid.contains(state.dof)) {
    throw std::invalid_argument("degree of freedom " + std::to_string(state.dof) + " is not on the prior grid");
  }
  const double dof = state.dof;

  PosteriorTerms terms;
  for (const auto& m : data.matrices) {
    if (m.rows() != p || m.cols() != p) throw DimensionMismatch("dataset matrices differ in size");
    terms.log_constant += log_wishart_constant(log_det_spd(m, "data matrix"), dof, p);
  }

  terms.crp_view = crp_log_prob(state.u, hyper.alpha_view);
  for (int v = 0; v < state.view_count(); ++v) {
    const auto nodes = state.view_nodes(v);
    const auto& yv = state.y[static_cast<std::size_t>(v)];
    const auto& zv = state.z[static_cast<std::size_t>(v)];
    terms.crp_node += crp_log_prob(yv, hyper.alpha_node);
    terms.crp_object += crp_log_prob(zv, hyper.alpha_object);

    const auto node_groups = label_members(yv);
    const auto object_groups = label_members(zv);
    for (const auto& group : node_groups) {
      const auto dim = static_cast<Eigen::Index>(group.size());
      for (const auto& members : object_groups) {
        BlockStats<double> stats{Eigen::MatrixXd::Zero(dim, dim), static_cast<int>(members.size())};
        for (int i : members) {
          const auto& m = data.matrices[static_cast<std::size_t>(i)];
          for (Eigen::Index a = 0; a < dim; ++a) {
            for (Eigen::Index b = 0; b < dim; ++b) {
              stats.sum_matrix(a, b) += m(nodes[static_cast<std::size_t>(group[static_cast<std::size_t>(a)])],
                                          nodes[static_cast<std::size_t>(group[static_cast<std::size_t>(b)])]);
            }
          }
        }
        terms.blocks += log_block_marginal(stats, dof);
      }
    }
  }
  terms.dof_prior = grid.log_prob();
  return terms;
}

double log_posterior(const Dataset& data, const ModelState& state, const Hyperparams& hyper) {
  return log_posterior_terms(data, state, hyper).total();
}

}  // namespace mvw
