#include <doctest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "mvw/errors.hpp"
#include "mvw/linalg.hpp"
#include "mvw/preprocess.hpp"

namespace {

Eigen::MatrixXd gaussian(int rows, int cols, mvw::Rng& rng) {
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

Eigen::MatrixXd fixed_series() {
  Eigen::MatrixXd x(8, 3);
  x << 0.3, -1.2, 0.5, 1.1, 0.4, -0.7, -0.6, 0.9, 1.3, 2.0, -0.3, 0.1, -1.4, 1.5, -0.2, 0.2, 0.0, 0.8, 0.9, -0.8,
      -1.1, -0.5, 0.6, 0.4;
  return x;
}

}  // namespace

TEST_CASE("empirical correlation") {
  Eigen::MatrixXd x(5, 2);
  x << 1, 2, 2, 1, 3, 4, 4, 3, 5, 6;
  const auto r = mvw::empirical_correlation(x);
  CHECK(r(0, 1) == doctest::Approx(0.8219949365267863).epsilon(1e-14));
  CHECK(r(0, 0) == 1.0);
  CHECK(r(1, 1) == 1.0);

  Eigen::MatrixXd twins(4, 3);
  twins << 1, 1, -1, 2, 2, -2, 0, 0, 0, 5, 5, -5;
  const auto rt = mvw::empirical_correlation(twins);
  CHECK(rt(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rt(0, 2) == doctest::Approx(-1.0).epsilon(1e-14));

  Eigen::MatrixXd flat(3, 2);
  flat << 1, 7, 2, 7, 3, 7;
  CHECK_THROWS_WITH_AS(mvw::empirical_correlation(flat), doctest::Contains("column 1 is constant"), std::invalid_argument);
  CHECK_THROWS_AS(mvw::empirical_correlation(Eigen::MatrixXd::Ones(1, 3)), std::invalid_argument);
}

TEST_CASE("Ledoit-Wolf reference estimate") {
  // Reference values from scikit-learn's ledoit_wolf on the same data.
  const auto est = mvw::ledoit_wolf(fixed_series());
  CHECK(est.shrinkage == doctest::Approx(0.5648071576306058).epsilon(1e-12));
  Eigen::MatrixXd expected(3, 3);
  expected << 0.8744725607294579, -0.24234801409445633, -0.12103800928398775, -0.24234801409445633,
      0.731878905971861, 0.050523169043821856, -0.12103800928398775, 0.050523169043821856, 0.6633360332986814;
  CHECK((est.covariance - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Ledoit-Wolf special cases") {
  mvw::Rng rng(8);
  SUBCASE("one column keeps the sample variance") {
    const Eigen::MatrixXd x = gaussian(30, 1, rng);
    const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
    const auto est = mvw::ledoit_wolf(x);
    CHECK(est.covariance(0, 0) == doctest::Approx(c.squaredNorm() / 30.0).epsilon(1e-13));
  }
  SUBCASE("a scaled identity sample covariance is a fixed point") {
    Eigen::MatrixXd x(4, 2);
    x << 1, 1, -1, 1, 1, -1, -1, -1;  // centered, S = I
    const auto est = mvw::ledoit_wolf(x);
    CHECK((est.covariance - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("all-zero input is rejected") {
    CHECK_THROWS_WITH(mvw::ledoit_wolf(Eigen::MatrixXd::Zero(5, 3)), doctest::Contains("degenerate"));
  }
  SUBCASE("correlation form keeps a unit diagonal") {
    const auto est = mvw::ledoit_wolf_correlation(gaussian(15, 6, rng));
    for (int i = 0; i < 6; ++i) CHECK(est.covariance(i, i) == 1.0);
    CHECK(est.shrinkage >= 0.0);
    CHECK(est.shrinkage <= 1.0);
  }
}

TEST_CASE("Ledoit-Wolf narrows the eigenvalue spread when T < p") {
  mvw::Rng rng(2024);
  const Eigen::MatrixXd x = gaussian(20, 50, rng);
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd s = c.transpose() * c / 20.0;
  const auto est = mvw::ledoit_wolf(x);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> before(s), after(est.covariance);
  CHECK(after.eigenvalues().maxCoeff() - after.eigenvalues().minCoeff() <
        before.eigenvalues().maxCoeff() - before.eigenvalues().minCoeff());
  CHECK(est.shrinkage > 0.0);
  CHECK(est.shrinkage <= 1.0);
}

TEST_CASE("Ledoit-Wolf output is positive definite on short series") {
  mvw::Rng rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const int p = 5 + int(rng.index(30));
    const int t = 3 + int(rng.index(std::uint64_t(p - 2)));
    const auto est = mvw::ledoit_wolf(gaussian(t, p, rng));
    CHECK_NOTHROW(mvw::cholesky_lower(est.covariance));
  }
}

TEST_CASE("two time points leave nothing to shrink with") {
  // Centered rows are x and -x: every outer product equals S, so the
  // estimated shrinkage is 0 and S keeps its rank of one.
  mvw::Rng rng(18);
  const auto est = mvw::ledoit_wolf(gaussian(2, 6, rng));
  CHECK(est.shrinkage == 0.0);
  CHECK_THROWS_AS(mvw::cholesky_lower(est.covariance), mvw::NotPositiveDefinite);
}

TEST_CASE("symmetric square roots of a 2x2 correlation") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 0.6, 0.6, 1.0;
  const double a = 0.5 * (std::sqrt(1.6) + std::sqrt(0.4));
  const double b = 0.5 * (std::sqrt(1.6) - std::sqrt(0.4));
  const auto r = mvw::sym_sqrt(m);
  CHECK(r(0, 0) == doctest::Approx(a).epsilon(1e-14));
  CHECK(r(0, 1) == doctest::Approx(b).epsilon(1e-14));
  CHECK((mvw::sym_inv_sqrt(m) * r - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("whitening") {
  mvw::Rng rng(4);
  SUBCASE("a constant dataset becomes the identity") {
    const Eigen::MatrixXd m0 = mvw::random_correlation(6, rng);
    mvw::Dataset d;
    d.matrices.assign(5, m0);
    d.t_ori = 20;
    const auto w = mvw::whiten(d);
    for (const auto& m : w.data.matrices) CHECK((m - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("whitened matrices average to the identity") {
    for (int rep = 0; rep < 20; ++rep) {
      mvw::Dataset d;
      d.kind = mvw::MatrixKind::covariance;
      d.t_ori = 30;
      for (int i = 0; i < 8; ++i) d.matrices.push_back(mvw::random_correlation(7, rng) * (0.5 + rng.uniform()));
      const auto w = mvw::whiten(d);
      CHECK((mvw::mean_matrix(w.data) - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((w.report.mean_sqrt * w.report.mean_inv_sqrt - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SUBCASE("scalar covariances around a unit mean") {
    mvw::Dataset d;
    d.kind = mvw::MatrixKind::covariance;
    d.t_ori = 10;
    d.matrices = {Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::MatrixXd::Constant(1, 1, 1.5)};
    const auto w = mvw::whiten(d);
    CHECK(w.report.mean_matrix(0, 0) == doctest::Approx(1.0));
    CHECK(w.data.matrices[0](0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(w.data.matrices[1](0, 0) == doctest::Approx(1.5).epsilon(1e-14));
    d.kind = mvw::MatrixKind::correlation;
    const auto wc = mvw::whiten(d);
    CHECK(wc.data.matrices[0](0, 0) == 1.0);
    CHECK(wc.data.matrices[1](0, 0) == 1.0);
  }
  SUBCASE("an explicit mean of the wrong size is rejected") {
    mvw::Dataset d;
    d.matrices = {Eigen::MatrixXd::Identity(3, 3)};
    d.t_ori = 10;
    CHECK_THROWS_AS(mvw::whiten(d, Eigen::MatrixXd::Identity(2, 2)), mvw::DimensionMismatch);
  }
}

TEST_CASE("pooled mean weights every subject equally") {
  mvw::Dataset a, b;
  a.matrices = {Eigen::MatrixXd::Identity(2, 2) * 1.0};
  b.matrices = {Eigen::MatrixXd::Identity(2, 2) * 2.0, Eigen::MatrixXd::Identity(2, 2) * 3.0};
  const std::vector<mvw::Dataset> sets{a, b};
  CHECK(mvw::pooled_mean_matrix(sets)(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("importance") {
  SUBCASE("identity mean: membership indicator") {
    mvw::WhitenReport rep{Eigen::MatrixXd::Identity(4, 4), Eigen::MatrixXd::Identity(4, 4), Eigen::MatrixXd::Identity(4, 4)};
    const std::vector<int> view{1, 3};
    for (int i = 0; i < 4; ++i) CHECK(mvw::importance(i, view, rep) == (i == 1 || i == 3 ? 1.0 : 0.0));
  }
  SUBCASE("2x2 mean with off-diagonal 0.6") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.6, 0.6, 1.0;
    mvw::WhitenReport rep{m, mvw::sym_inv_sqrt(m), mvw::sym_sqrt(m)};
    const double a = 0.5 * (std::sqrt(1.6) + std::sqrt(0.4));
    const double b = 0.5 * (std::sqrt(1.6) - std::sqrt(0.4));
    const std::vector<int> both{0, 1}, second{1};
    CHECK(mvw::importance(0, both, rep) == doctest::Approx(1.0 + b / a).epsilon(1e-13));
    CHECK(mvw::importance(0, both, rep) == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
    CHECK(mvw::importance(0, second, rep) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(mvw::importance(0, both, rep, mvw::ImportanceScale::raw) == doctest::Approx(a + b).epsilon(1e-13));
    CHECK(mvw::importance(0, both, rep, mvw::ImportanceScale::raw) == doctest::Approx(1.2649110640673515).epsilon(1e-13));
  }
  SUBCASE("whole view dominates the diagonal term") {
    mvw::Rng rng(6);
    const Eigen::MatrixXd m = mvw::random_correlation(5, rng);
    mvw::WhitenReport rep{m, mvw::sym_inv_sqrt(m), mvw::sym_sqrt(m)};
    const std::vector<int> all{0, 1, 2, 3, 4};
    const auto profile = mvw::importance_profile(all, rep);
    for (double v : profile) CHECK(v >= 1.0);
  }
  SUBCASE("empty view and bad indices") {
    mvw::WhitenReport rep{Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)};
    CHECK(mvw::importance(0, std::vector<int>{}, rep) == 0.0);
    CHECK_THROWS_AS(mvw::importance(2, std::vector<int>{0}, rep), std::out_of_range);
    CHECK_THROWS_AS(mvw::importance(0, std::vector<int>{5}, rep), std::out_of_range);
  }
}
