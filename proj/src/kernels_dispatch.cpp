#include "imagery/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace imagery::kern {

// Defined in kernels_avx2.cpp; nullptr when the build lacks AVX2.
const Ops* avx2_ops_impl();

namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops& select_backend() {
  const char* force = std::getenv("IMAGERY_KERNELS");
  if (force != nullptr) {
    if (std::strcmp(force, "scalar") == 0) return scalar_ops();
    if (std::strcmp(force, "avx2") == 0) {
      const Ops* v = avx2_ops();
      if (v) return *v;
    }
    // Unknown or unavailable override falls through to auto-detection.
  }
  const Ops* v = avx2_ops();
  return v ? *v : scalar_ops();
}

}  // namespace

const Ops* avx2_ops() {
  static const Ops* resolved = [] {
    const Ops* impl = avx2_ops_impl();
    return (impl != nullptr && cpu_has_avx2()) ? impl : nullptr;
  }();
  return resolved;
}

const Ops& ops() {
  static const Ops& selected = select_backend();
  return selected;
}

std::string backend_name() { return ops().name; }

}  // namespace imagery::kern
