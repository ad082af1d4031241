#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>
#include <unistd.h>

#include <Eigen/Dense>

#include "mvw/model.hpp"
#include "mvw/rng.hpp"
#include "mvw/synthgen.hpp"

namespace mvw::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "mvw") {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(stamp) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

/// Random SPD matrix with a unit diagonal.
inline Eigen::MatrixXd random_spd_correlation(int p, Rng& rng) { return random_correlation(p, rng); }

inline SynthData small_benchmark(std::uint64_t seed, double w = 0.2, int p = 12, int n = 24, int views = 2,
                                 int clusters = 2) {
  SynthConfig cfg;
  cfg.p = p;
  cfg.n = n;
  cfg.views = views;
  cfg.clusters = clusters;
  cfg.w = w;
  cfg.seed = seed;
  cfg.balanced = true;
  return generate(cfg);
}

}  // namespace mvw::testing
