#pragma once

#include "mvw/model.hpp"
#include "mvw/priors.hpp"

namespace mvw {

/// The additive pieces of the collapsed log posterior.
struct PosteriorTerms {
  double log_constant = 0.0;   // sum_i log C_{M_i, T}
  double blocks = 0.0;         // sum over (view, object cluster, node cluster) marginals
  double crp_view = 0.0;
  double crp_node = 0.0;       // summed over views
  double crp_object = 0.0;     // summed over views
  double dof_prior = 0.0;

  double total() const { return log_constant + blocks + crp_view + crp_node + crp_object + dof_prior; }
};

/// Evaluates every term from scratch. The state's T must lie on the grid
/// implied by (p, t_ori, delta).
PosteriorTerms log_posterior_terms(const Dataset& data, const ModelState& state, const Hyperparams& hyper);

double log_posterior(const Dataset& data, const ModelState& state, const Hyperparams& hyper);

}  // namespace mvw
