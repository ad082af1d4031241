#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "mvw/rng.hpp"
#include "mvw/wishart.hpp"
#include "normalization.hpp"
#include "quadrature.hpp"

using mvw::BlockStats;
using mvw::Mat;

namespace {

Mat<double> scalar(double x) { return Mat<double>::Constant(1, 1, x); }

double log_w1(double m, double dof, double sigma) { return mvw::log_wishart_density(scalar(m), dof, scalar(sigma)); }

}  // namespace

TEST_CASE("log multigamma matches reference values") {
  CHECK(mvw::log_multigamma(2.0, 1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(mvw::log_multigamma(1.5, 2) == doctest::Approx(0.4515827052894548).epsilon(1e-13));
  CHECK(mvw::log_multigamma(3.0, 3) == doctest::Approx(2.694924879806965).epsilon(1e-13));
}

TEST_CASE("log multigamma satisfies the dimension recurrence") {
  for (int p = 2; p <= 6; ++p) {
    for (double a : {3.0, 4.25, 10.5}) {
      const double lhs = mvw::log_multigamma(a, p);
      const double rhs = 0.5 * (p - 1) * std::log(std::numbers::pi) + std::lgamma(a) + mvw::log_multigamma(a - 0.5, p - 1);
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("log multigamma rejects arguments outside its domain") {
  CHECK_THROWS_AS(mvw::log_multigamma(0.5, 2), std::domain_error);
  CHECK_THROWS_AS(mvw::log_multigamma(1.0, 0), std::domain_error);
}

TEST_CASE("scalar Wishart with one degree of freedom is the chi-square(1) density") {
  const double expected = std::log(boost::math::pdf(boost::math::chi_squared(1.0), 1.0));
  CHECK(std::abs(log_w1(1.0, 1.0, 1.0) - (-1.4189385332046727)) < 1e-10);
  CHECK(std::abs(log_w1(1.0, 1.0, 1.0) - expected) < 1e-10);
}

TEST_CASE("scalar Wishart equals a scaled chi-square density") {
  for (double dof : {2.0, 5.0, 11.5}) {
    for (double sigma : {0.3, 1.0, 4.0}) {
      for (double m : {0.2, 1.7, 9.0}) {
        const double ref = std::log(boost::math::pdf(boost::math::chi_squared(dof), m / sigma) / sigma);
        CHECK(std::abs(log_w1(m, dof, sigma) - ref) < 1e-10);
      }
    }
  }
}

TEST_CASE("2x2 Wishart at the identity") {
  const Mat<double> i2 = Mat<double>::Identity(2, 2);
  const double v = mvw::log_wishart_density(i2, 5.0, i2);
  CHECK(std::abs(v - (-5.322783716197346)) < 1e-10);
  CHECK(std::abs(v - (-5.32276)) < 1e-4);
}

TEST_CASE("joint rescaling of M and Sigma shifts the scalar log density by -log c") {
  for (double c : {0.25, 2.0, 7.5}) {
    CHECK(std::abs(log_w1(c * 1.3, 3.0, c * 0.8) - (log_w1(1.3, 3.0, 0.8) - std::log(c))) < 1e-12);
  }
}

TEST_CASE("Wishart density input validation") {
  const Mat<double> i2 = Mat<double>::Identity(2, 2);
  Mat<double> bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(mvw::log_wishart_density(bad, 5.0, i2), mvw::NotPositiveDefinite);
  CHECK_THROWS_AS(mvw::log_wishart_density(i2, 5.0, bad), mvw::NotPositiveDefinite);
  CHECK_THROWS_AS(mvw::log_wishart_density(i2, 0.5, i2), std::domain_error);
  CHECK_THROWS_AS(mvw::log_wishart_density(i2, 5.0, Mat<double>::Identity(3, 3)), mvw::DimensionMismatch);
}

TEST_CASE("Wishart density is templated on the scalar") {
  const Eigen::MatrixXf m = Eigen::MatrixXf::Identity(2, 2);
  const float v = mvw::log_wishart_density(m, 5.0f, m);
  CHECK(std::abs(double(v) - (-5.322783716197346)) < 1e-5);
}

TEST_CASE("scalar samples follow the scalar density (Kolmogorov-Smirnov)") {
  const auto ks = mvw::testing::scalar_ks_check(50000, 5, 1.5, 20240901);
  CHECK(std::abs(ks.total_mass - 1.0) < 1e-8);
  CHECK(ks.statistic < ks.critical);
}

TEST_CASE("Wishart density integrates to one (importance sampling)") {
  const double z_crit = 2.5758;  // two-sided 1%
  for (int p : {1, 2}) {
    CAPTURE(p);
    const auto mass = mvw::testing::importance_mass(p, 50000, 77 + std::uint64_t(p));
    CHECK(std::abs(mass.z) < z_crit);
    CHECK(mass.mean == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("scalar block marginal worked value") {
  BlockStats<double> stats{scalar(1.0), 1};
  const double v = mvw::log_block_marginal(stats, 10.0, 4.0, scalar(0.2));
  CHECK(std::abs(v - 5.549860392383945) < 1e-12);
  CHECK(std::abs(v - 5.54986) < 1e-4);
  // The default prior nu = p' + 3, S = 2I/T is the same point.
  CHECK(mvw::log_block_marginal(stats, 10.0) == doctest::Approx(v).epsilon(1e-15));
}

TEST_CASE("scalar block marginal agrees with quadrature") {
  for (int count : {1, 2, 5}) {
    for (double dof : {10.0, 40.0}) {
      for (double m : {0.1, 1.0, 10.0}) {
        CAPTURE(count);
        CAPTURE(dof);
        CAPTURE(m);
        const double nu = 4.0, s = 2.0 / dof;
        BlockStats<double> stats{scalar(m), count};
        const double closed = mvw::log_block_marginal(stats, dof, nu, scalar(s));
        const double numeric = mvw::testing::quadrature_block_marginal_1d(m, count, dof, nu, s);
        CHECK(std::abs(closed - numeric) < 1e-6);
      }
    }
  }
}

TEST_CASE("empty block contributes nothing") {
  BlockStats<double> stats{Mat<double>::Zero(3, 3), 0};
  CHECK(mvw::log_block_marginal(stats, 12.0) == 0.0);
}

TEST_CASE("block marginal depends only on the sufficient statistics") {
  mvw::Rng rng(5);
  std::vector<Mat<double>> ms;
  for (int i = 0; i < 4; ++i) ms.push_back(mvw::Mat<double>(Eigen::MatrixXd::Identity(3, 3) * (1.0 + rng.uniform())));
  Mat<double> forward = Mat<double>::Zero(3, 3), backward = Mat<double>::Zero(3, 3);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    forward += ms[i];
    backward += ms[ms.size() - 1 - i];
  }
  const double a = mvw::log_block_marginal(BlockStats<double>{forward, 4}, 9.0);
  const double b = mvw::log_block_marginal(BlockStats<double>{backward, 4}, 9.0);
  CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("similarity is the Wishart with mean A") {
  Mat<double> a(2, 2), b(2, 2);
  a << 1.0, 0.4, 0.4, 1.0;
  b << 1.0, -0.2, -0.2, 1.0;
  const double dof = 10.0;
  CHECK(mvw::wishart_similarity(b, a, dof) == mvw::log_wishart_density(b, dof, Mat<double>(a / dof)));
}

TEST_CASE("similarity is asymmetric") {
  CHECK(mvw::wishart_similarity(scalar(4.0), scalar(1.0), 5.0) !=
        doctest::Approx(mvw::wishart_similarity(scalar(1.0), scalar(4.0), 5.0)));
}

TEST_CASE("for fixed B the similarity peaks at A = B") {
  const Mat<double> b = scalar(1.0);
  double best = -1e300, best_a = 0.0;
  for (double a : {0.5, 1.0, 2.0}) {
    const double s = mvw::wishart_similarity(b, scalar(a), 10.0);
    if (s > best) {
      best = s;
      best_a = a;
    }
  }
  CHECK(best_a == 1.0);

  mvw::Rng rng(3);
  Eigen::MatrixXd x(40, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  const Eigen::MatrixXd bm = x.transpose() * x / 40.0;
  const double at_self = mvw::wishart_similarity(bm, bm, 20.0);
  for (double scale : {0.8, 0.95, 1.05, 1.25}) CHECK(mvw::wishart_similarity(bm, Eigen::MatrixXd(scale * bm), 20.0) < at_self);
  CHECK(mvw::wishart_similarity(bm, Eigen::MatrixXd::Identity(3, 3), 20.0) < at_self);
}
