#pragma once

#include <stdexcept>
#include <string>

namespace mvw {

// Raised when a Cholesky factorization fails on input that must be SPD.
class NotPositiveDefinite : public std::runtime_error {
 public:
  explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public std::invalid_argument {
 public:
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// No admissible degree of freedom: max(2p, t_ori) < p + 5.
class EmptyDofGrid : public std::invalid_argument {
 public:
  explicit EmptyDofGrid(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace mvw
