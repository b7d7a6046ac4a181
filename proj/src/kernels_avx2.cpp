#include "imagery/kernels.hpp"

#ifdef IMAGERY_BUILD_AVX2

#include <immintrin.h>

#include <cmath>

namespace imagery::kern {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) r = std::fma(a[i], b[i], r);
  return r;
}

double sq_dist_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) {
    double d = a[i] - b[i];
    r = std::fma(d, d, r);
  }
  return r;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i];
  return r;
}

double max_abs_avx2(const double* a, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(a + i));
    acc = _mm256_max_pd(acc, v);
  }
  double lanes[4];
  _mm256_storeu_pd(lanes, acc);
  double m = lanes[0];
  for (int k = 1; k < 4; ++k)
    if (lanes[k] > m) m = lanes[k];
  for (; i < n; ++i) {
    double v = std::fabs(a[i]);
    if (v > m) m = v;
  }
  return m;
}

void axpby_avx2(double* out, double a, const double* x, double b,
                const double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d by = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), by));
  }
  for (; i < n; ++i) out[i] = std::fma(a, x[i], b * y[i]);
}

void axpy_avx2(double* out, double a, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                              _mm256_loadu_pd(out + i)));
  }
  for (; i < n; ++i) out[i] = std::fma(a, x[i], out[i]);
}

void scale_avx2(double* out, double a, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = a * x[i];
}

}  // namespace

const Ops* avx2_ops_impl() {
  static const Ops table = {
      dot_avx2, sq_dist_avx2, sum_avx2,   max_abs_avx2,
      axpby_avx2, axpy_avx2,  scale_avx2, "avx2",
  };
  return &table;
}

}  // namespace imagery::kern

#else

namespace imagery::kern {
const Ops* avx2_ops_impl() { return nullptr; }
}  // namespace imagery::kern

#endif  // IMAGERY_BUILD_AVX2
