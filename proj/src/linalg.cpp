#include "mvw/linalg.hpp"

#include <limits>

namespace mvw {

// Row-oriented Cholesky: column j of the buffer holds row j of L, so only the
// upper triangle (rows <= column) is read and overwritten.
double log_det_spd_inplace(double* a, int n, int ld) noexcept {
  double log_det = 0.0;
  for (int j = 0; j < n; ++j) {
    double* row_j = a + static_cast<std::ptrdiff_t>(j) * ld;
    for (int i = 0; i < j; ++i) {
      const double* row_i = a + static_cast<std::ptrdiff_t>(i) * ld;
      double s = row_j[i];
      for (int k = 0; k < i; ++k) s -= row_j[k] * row_i[k];
      row_j[i] = s / row_i[i];
    }
    double d = row_j[j];
    for (int k = 0; k < j; ++k) d -= row_j[k] * row_j[k];
    if (!(d > 0.0) || !std::isfinite(d)) return std::numeric_limits<double>::quiet_NaN();
    row_j[j] = std::sqrt(d);
    log_det += std::log(d);
  }
  return log_det;
}

}  // namespace mvw
