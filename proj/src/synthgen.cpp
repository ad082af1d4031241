#include "mvw/synthgen.hpp"

#include <numeric>
#include <stdexcept>

#include "mvw/linalg.hpp"
#include "mvw/preprocess.hpp"

namespace mvw {

namespace {

// Stream indices; object i samples from derive_seed(seed, i).
constexpr std::uint64_t kStructureStream = 0xffffffff00000001ULL;
constexpr std::uint64_t kLabelStream = 0xffffffff00000002ULL;

std::vector<int> draw_labels(int n, int k, bool balanced, Rng& rng) {
  std::vector<int> labels(static_cast<std::size_t>(n));
  if (balanced) {
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i % k;
    rng.shuffle(std::span<int>(labels));
  } else {
    for (auto& l : labels) l = static_cast<int>(rng.index(static_cast<std::uint64_t>(k)));
  }
  return labels;
}

}  // namespace

void SynthConfig::validate() const {
  if (p < 1 || n < 1 || views < 1 || clusters < 1) throw std::invalid_argument("synthetic sizes must be positive");
  if (p % views != 0) throw std::invalid_argument("p must be divisible by the number of views");
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("noise weight w must be in [0, 1]");
  if (!(background > -1.0 && background < 1.0)) throw std::invalid_argument("background must be in (-1, 1)");
  if (samples() < 2) throw std::invalid_argument("need at least 2 samples per object");
}

Eigen::MatrixXd random_correlation(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("random_correlation: dimension must be >= 1");
  for (;;) {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
      for (int i = j; i < dim; ++i) l(i, j) = rng.normal();
    }
    const Eigen::MatrixXd a = l * l.transpose();
    Eigen::LLT<Eigen::MatrixXd> check(a);
    if (check.info() != Eigen::Success || !(a.diagonal().minCoeff() > 0.0)) continue;
    Eigen::MatrixXd r = to_correlation(a);

    std::vector<int> perm(static_cast<std::size_t>(dim));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<int>(perm));
    Eigen::MatrixXd out(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) out(i, j) = r(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    return out;
  }
}

SynthData generate(const SynthConfig& config) {
  config.validate();
  const int p = config.p, n = config.n, nv = config.views, k = config.clusters;
  const int width = p / nv;

  Rng structure(derive_seed(config.seed, kStructureStream));
  std::vector<std::vector<Eigen::MatrixXd>> blocks(static_cast<std::size_t>(nv));
  for (auto& per_view : blocks) {
    for (int c = 0; c < k; ++c) per_view.push_back(random_correlation(width, structure));
  }

  SynthData out;
  out.truth.view_labels.resize(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) out.truth.view_labels[static_cast<std::size_t>(i)] = i / width;
  Rng label_rng(derive_seed(config.seed, kLabelStream));
  for (int v = 0; v < nv; ++v) out.truth.cluster_labels.push_back(draw_labels(n, k, config.balanced, label_rng));

  Eigen::MatrixXd noise = Eigen::MatrixXd::Constant(p, p, config.background);
  noise.diagonal().setOnes();

  out.data.kind = MatrixKind::correlation;
  out.data.t_ori = config.samples();
  const int t = config.samples();
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(p, p);
    for (int v = 0; v < nv; ++v) {
      const int c = out.truth.cluster_labels[static_cast<std::size_t>(v)][static_cast<std::size_t>(i)];
      sigma.block(v * width, v * width, width, width) = blocks[static_cast<std::size_t>(v)][static_cast<std::size_t>(c)];
    }
    Eigen::MatrixXd star = (1.0 - config.w) * sigma + config.w * noise;
    const Eigen::MatrixXd l = cholesky_lower(star, "noisy population covariance");

    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(i)));
    Eigen::MatrixXd g(p, t);
    for (int s = 0; s < t; ++s) {
      for (int j = 0; j < p; ++j) g(j, s) = rng.normal();
    }
    const Eigen::MatrixXd x = (l * g).transpose();
    out.data.matrices.push_back(empirical_correlation(x));
    out.population.push_back(std::move(star));
  }
  return out;
}

}  // namespace mvw
