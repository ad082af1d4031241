#include <doctest.h>

#include <algorithm>
#include <vector>

#include "mvw/labels.hpp"
#include "mvw/linalg.hpp"
#include "mvw/synthgen.hpp"

TEST_CASE("random correlation matrices") {
  mvw::Rng rng(1);
  CHECK(mvw::random_correlation(1, rng)(0, 0) == 1.0);
  for (int dim : {2, 5, 10, 30}) {
    const auto r = mvw::random_correlation(dim, rng);
    for (int i = 0; i < dim; ++i) CHECK(r(i, i) == 1.0);
    CHECK(mvw::is_symmetric(r, 0.0));
    CHECK_NOTHROW(mvw::cholesky_lower(r));
    CHECK(r.cwiseAbs().maxCoeff() <= 1.0);
  }
  mvw::Rng a(42), b(42);
  CHECK(mvw::random_correlation(6, a) == mvw::random_correlation(6, b));
  CHECK_THROWS_AS(mvw::random_correlation(0, rng), std::invalid_argument);
}

TEST_CASE("default benchmark shape") {
  mvw::SynthConfig cfg;
  cfg.seed = 3;
  const auto s = mvw::generate(cfg);
  CHECK(s.data.n() == 100);
  CHECK(s.data.p() == 30);
  CHECK(s.data.t_ori == 40);
  CHECK_NOTHROW(s.data.validate());
  REQUIRE(s.truth.cluster_labels.size() == 3);
  CHECK(s.truth.view_labels == mvw::canonicalize(s.truth.view_labels));
  CHECK(mvw::label_count(s.truth.view_labels) == 3);
  for (const auto& labels : s.truth.cluster_labels) {
    CHECK(labels.size() == 100);
    CHECK(mvw::label_count(labels) <= 4);
  }
}

TEST_CASE("balanced labels give equal cluster sizes") {
  mvw::SynthConfig cfg;
  cfg.balanced = true;
  cfg.seed = 8;
  const auto s = mvw::generate(cfg);
  for (const auto& labels : s.truth.cluster_labels) {
    for (int size : mvw::block_sizes(labels)) CHECK(size == 25);
  }
}

TEST_CASE("uniform labels pass a chi-square sanity check") {
  mvw::SynthConfig cfg;
  cfg.p = 4;
  cfg.views = 2;
  cfg.n = 4000;
  cfg.seed = 12;
  const auto s = mvw::generate(cfg);
  for (const auto& labels : s.truth.cluster_labels) {
    const auto sizes = mvw::block_sizes(labels);
    REQUIRE(sizes.size() == 4);
    double chi2 = 0.0;
    for (int c : sizes) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
    CHECK(chi2 < 16.27);  // 0.999 quantile, 3 degrees of freedom
  }
}

TEST_CASE("population covariance structure") {
  mvw::SynthConfig cfg;
  cfg.p = 12;
  cfg.views = 3;
  cfg.n = 10;
  cfg.seed = 5;

  SUBCASE("no noise: views are uncorrelated") {
    const auto s = mvw::generate(cfg);
    for (const auto& star : s.population) {
      for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) {
          if (i / 4 != j / 4) CHECK(star(i, j) == 0.0);
        }
      }
    }
  }
  SUBCASE("pure noise without background is the identity") {
    cfg.w = 1.0;
    const auto s = mvw::generate(cfg);
    for (const auto& star : s.population) CHECK(star == Eigen::MatrixXd::Identity(12, 12));
  }
  SUBCASE("background coupling") {
    cfg.w = 0.5;
    cfg.background = 0.2;
    const auto s = mvw::generate(cfg);
    for (const auto& star : s.population) CHECK(star(0, 11) == doctest::Approx(0.1));
  }
  SUBCASE("objects sharing a cluster share the block") {
    const auto s = mvw::generate(cfg);
    const auto& z = s.truth.cluster_labels[0];
    for (int i = 0; i < cfg.n; ++i) {
      for (int j = 0; j < cfg.n; ++j) {
        if (z[std::size_t(i)] == z[std::size_t(j)]) {
          CHECK(s.population[std::size_t(i)].topLeftCorner(4, 4) == s.population[std::size_t(j)].topLeftCorner(4, 4));
        }
      }
    }
  }
}

TEST_CASE("generation is deterministic in the seed") {
  mvw::SynthConfig cfg;
  cfg.p = 9;
  cfg.n = 7;
  cfg.seed = 99;
  const auto a = mvw::generate(cfg), b = mvw::generate(cfg);
  CHECK(a.data.matrices == b.data.matrices);
  CHECK(a.truth.cluster_labels == b.truth.cluster_labels);
  cfg.seed = 100;
  CHECK(mvw::generate(cfg).data.matrices != a.data.matrices);
}

TEST_CASE("invalid configurations") {
  mvw::SynthConfig cfg;
  cfg.p = 10;
  CHECK_THROWS_AS(mvw::generate(cfg), std::invalid_argument);  // 10 nodes, 3 views
  cfg = {};
  cfg.w = 1.5;
  CHECK_THROWS_AS(mvw::generate(cfg), std::invalid_argument);
  cfg = {};
  cfg.t = 1;
  CHECK_THROWS_AS(mvw::generate(cfg), std::invalid_argument);
}
