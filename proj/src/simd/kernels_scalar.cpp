#include "cswitch/simd/kernels.hpp"

#include <cmath>

namespace cswitch::simd::scalar {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::fabs(a[k] - b[k]);
  return acc;
}

void vec_mat(std::span<const double> x, std::span<const double> m, std::span<double> out) {
  const std::size_t cols = out.size();
  for (double& o : out) o = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* row = m.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] += xi * row[j];
  }
}

void mat_vec(std::span<const double> m, std::span<const double> x, std::span<double> out) {
  const std::size_t cols = x.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = dot(m.subspan(i * cols, cols), x);
  }
}

}  // namespace cswitch::simd::scalar
