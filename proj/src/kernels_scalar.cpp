#include "imagery/kernels.hpp"

#include <cmath>

namespace imagery::kern {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc = std::fma(a[i], b[i], acc);
  return acc;
}

double sq_dist_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = a[i] - b[i];
    acc = std::fma(d, d, acc);
  }
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double max_abs_scalar(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = std::fabs(a[i]);
    if (v > m) m = v;
  }
  return m;
}

// out = a*x + b*y, single-rounded as fma(a, x, b*y) to match the AVX2 path.
void axpby_scalar(double* out, double a, const double* x, double b,
                  const double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fma(a, x[i], b * y[i]);
}

void axpy_scalar(double* out, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fma(a, x[i], out[i]);
}

void scale_scalar(double* out, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table = {
      dot_scalar, sq_dist_scalar, sum_scalar,  max_abs_scalar,
      axpby_scalar, axpy_scalar,  scale_scalar, "scalar",
  };
  return table;
}

}  // namespace imagery::kern
