#pragma once

#include <cmath>
#include <cstdint>

// Counter-based deterministic randomness. Every consumer derives its own
// seed via mix_seed(run_seed, step, parent, child) and owns a private
// splitmix64 stream, so results never depend on scheduling or worker count.
// Normal deviates are hand-rolled Box-Muller: std::normal_distribution is
// not bit-portable across standard libraries.

namespace imagery {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t sm_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// child_seed = mix(run_seed, step_index, parent_id, child_index).
inline std::uint64_t mix_seed(std::uint64_t run_seed, std::uint64_t step,
                              std::uint64_t parent, std::uint64_t child) {
  std::uint64_t h = sm_mix(run_seed + kGolden);
  h = sm_mix(h + kGolden + step);
  h = sm_mix(h + kGolden + parent);
  h = sm_mix(h + kGolden + child);
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return sm_mix(state_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the log finite.
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  void fill_normal(double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = next_normal();
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace imagery
