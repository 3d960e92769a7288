#include "cswitch/simd/kernels.hpp"

#if defined(CSWITCH_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace cswitch::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + k), _mm256_loadu_pd(b.data() + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + k + 4), _mm256_loadu_pd(b.data() + k + 4),
                           acc1);
  }
  for (; k + 4 <= n; k += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + k), _mm256_loadu_pd(b.data() + k), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += a[k] * b[k];
  return acc;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + k), _mm256_loadu_pd(b.data() + k));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign_mask, d));
  }
  double out = hsum(acc);
  for (; k < n; ++k) out += std::fabs(a[k] - b[k]);
  return out;
}

void vec_mat(std::span<const double> x, std::span<const double> m, std::span<double> out) {
  const std::size_t cols = out.size();
  for (double& o : out) o = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* row = m.data() + i * cols;
    const __m256d vx = _mm256_set1_pd(xi);
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      __m256d o = _mm256_loadu_pd(out.data() + j);
      o = _mm256_fmadd_pd(vx, _mm256_loadu_pd(row + j), o);
      _mm256_storeu_pd(out.data() + j, o);
    }
    for (; j < cols; ++j) out[j] += xi * row[j];
  }
}

void mat_vec(std::span<const double> m, std::span<const double> x, std::span<double> out) {
  const std::size_t cols = x.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = dot(m.subspan(i * cols, cols), x);
  }
}

}  // namespace cswitch::simd::avx2

#endif
