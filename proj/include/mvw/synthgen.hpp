#pragma once

#include <cstdint>
#include <utility>

#include <Eigen/Dense>

#include "mvw/model.hpp"
#include "mvw/rng.hpp"

namespace mvw {

/// Planted multi-view benchmark. background = 0 gives independent views
/// (Type 1); a positive background couples every node pair (Type 2).
struct SynthConfig {
  int p = 30;
  int n = 100;
  int views = 3;
  int clusters = 4;       // object clusters per view
  double w = 0.0;         // noise weight
  double background = 0.0;
  int t = 0;              // samples per object; 0 means p + 10
  std::uint64_t seed = 0;
  bool balanced = false;  // exact equal cluster sizes instead of uniform draws

  int samples() const { return t > 0 ? t : p + 10; }
  void validate() const;
};

/// LL' for a lower-triangular L of standard normals, scaled to unit
/// diagonal, with rows and columns permuted at random.
Eigen::MatrixXd random_correlation(int dim, Rng& rng);

struct SynthData {
  Dataset data;
  GroundTruth truth;
  // Population covariance of every object, kept for tests.
  std::vector<Eigen::MatrixXd> population;
};

SynthData generate(const SynthConfig& config);

}  // namespace mvw
