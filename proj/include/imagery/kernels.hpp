#pragma once

#include <cstddef>
#include <string>

// Double-precision vector kernels used by the hot paths (DDIM updates,
// pairwise distances, mixture responsibilities, covariance dots).
//
// Two backends: a scalar reference and an AVX2 variant, selected once at
// runtime. Elementwise ops (axpby/axpy/scale) are bit-identical across
// backends (both single-round through fma); reductions (dot/sq_dist/sum)
// may differ in the last ulps because the lane accumulation reorders the
// sum — equivalence tests bound that difference.
//
// IMAGERY_KERNELS=scalar|avx2 in the environment forces a backend.

namespace imagery::kern {

struct Ops {
  // acc ops
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sq_dist)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  double (*max_abs)(const double* a, std::size_t n);
  // elementwise
  void (*axpby)(double* out, double a, const double* x, double b,
                const double* y, std::size_t n);  // out = a*x + b*y
  void (*axpy)(double* out, double a, const double* x,
               std::size_t n);                    // out += a*x
  void (*scale)(double* out, double a, const double* x, std::size_t n);
  const char* name;
};

const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when the build or CPU lacks AVX2
const Ops& ops();       // runtime-selected backend (resolved once)

inline double dot(const double* a, const double* b, std::size_t n) {
  return ops().dot(a, b, n);
}
inline double sq_norm(const double* a, std::size_t n) {
  return ops().dot(a, a, n);
}
inline double sq_dist(const double* a, const double* b, std::size_t n) {
  return ops().sq_dist(a, b, n);
}
inline double sum(const double* a, std::size_t n) { return ops().sum(a, n); }
inline double max_abs(const double* a, std::size_t n) {
  return ops().max_abs(a, n);
}
inline void axpby(double* out, double a, const double* x, double b,
                  const double* y, std::size_t n) {
  ops().axpby(out, a, x, b, y, n);
}
inline void axpy(double* out, double a, const double* x, std::size_t n) {
  ops().axpy(out, a, x, n);
}
inline void scale(double* out, double a, const double* x, std::size_t n) {
  ops().scale(out, a, x, n);
}

std::string backend_name();

}  // namespace imagery::kern
