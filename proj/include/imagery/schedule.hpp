#pragma once

#include <cstddef>
#include <string>

#include "imagery/embedding.hpp"

namespace imagery {

enum class ScheduleKind { LinearAlphaBar, CosineAlphaBar };

const char* to_string(ScheduleKind k);
ScheduleKind schedule_kind_from_string(const std::string& s);

// Variance-preserving coefficients indexed t = 0..T; t = 0 is the data end
// (zeta 1, sigma 0), zeta strictly decreasing in t, zeta² + sigma² = 1.
struct NoiseSchedule {
  std::size_t T = 0;
  Vec zeta;
  Vec sigma;
  ScheduleKind kind = ScheduleKind::LinearAlphaBar;
};

// linear-alpha-bar: ᾱ_t = 1 − t/(T+1); cosine-alpha-bar:
// ᾱ_t = cos²((t/T)·(π/2)·0.999). zeta = √ᾱ, sigma = √(1−ᾱ).
NoiseSchedule make_schedule(std::size_t T, ScheduleKind kind);

}  // namespace imagery
