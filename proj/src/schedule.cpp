#include "imagery/schedule.hpp"

#include <cmath>

#include "imagery/error.hpp"

namespace imagery {

const char* to_string(ScheduleKind k) {
  return k == ScheduleKind::LinearAlphaBar ? "linear-alpha-bar"
                                           : "cosine-alpha-bar";
}

ScheduleKind schedule_kind_from_string(const std::string& s) {
  if (s == "linear-alpha-bar") return ScheduleKind::LinearAlphaBar;
  if (s == "cosine-alpha-bar") return ScheduleKind::CosineAlphaBar;
  throw Error(ErrorKind::Parse, "unknown schedule kind: " + s);
}

NoiseSchedule make_schedule(std::size_t T, ScheduleKind kind) {
  if (T < 2) throw Error(ErrorKind::InvalidConfig, "make_schedule: T < 2");
  NoiseSchedule s;
  s.T = T;
  s.kind = kind;
  s.zeta.assign(T + 1, 0.0);
  s.sigma.assign(T + 1, 0.0);
  s.zeta[0] = 1.0;
  s.sigma[0] = 0.0;
  const double pi = 3.14159265358979323846;
  for (std::size_t t = 1; t <= T; ++t) {
    double abar;
    if (kind == ScheduleKind::LinearAlphaBar) {
      abar = 1.0 - static_cast<double>(t) / static_cast<double>(T + 1);
    } else {
      double c = std::cos(static_cast<double>(t) / static_cast<double>(T) *
                          (pi / 2.0) * 0.999);
      abar = c * c;
    }
    s.zeta[t] = std::sqrt(abar);
    s.sigma[t] = std::sqrt(1.0 - abar);
  }
  return s;
}

}  // namespace imagery
