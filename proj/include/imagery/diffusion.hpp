#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "imagery/embedding.hpp"
#include "imagery/prompt.hpp"
#include "imagery/schedule.hpp"

namespace imagery {

struct DiffusionState {
  Vec x;
  std::size_t t = 0;  // 0 = data end
  std::uint64_t nfe_so_far = 0;
};

struct GmComponent {
  double w = 1.0;
  Vec mu;
  double s = 0.0;  // isotropic std
};

struct GaussianMixtureTarget {
  std::vector<GmComponent> components;
  std::size_t dim = 0;

  void validate() const;  // weights > 0 summing to 1, shared dims, finite
};

// JSON {"dim": n, "components": [{"w": f, "mu": [f,...], "s": f}, ...]}.
GaussianMixtureTarget load_target(const std::string& path);

class NfeCounter {
 public:
  void add(std::uint64_t n = 1) {
    count_.fetch_add(n, std::memory_order_relaxed);
  }
  std::uint64_t value() const { return count_.load(std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> count_{0};
};

// f_theta of Eq. 1: pure function of (x, t, condition).
class DenoiserModel {
 public:
  virtual ~DenoiserModel() = default;
  virtual Vec predict_noise(const Vec& x, std::size_t t,
                            const PromptSpec& prompt) const = 0;
  virtual std::size_t dim() const = 0;
};

// Exact Bayes posterior-mean noise prediction for the forward process
// x_t = zeta_t x0 + sigma_t eps under a Gaussian-mixture data law.
// Responsibilities are computed in log-space with max subtraction.
// Throws DivisionByZero at sigma_t = 0 (cannot query the data end).
Vec gm_predict_noise(const GaussianMixtureTarget& target,
                     const NoiseSchedule& schedule, const Vec& x,
                     std::size_t t);

// log p(x) under the mixture at the data end (s floored at 1e-9 so delta
// components stay finite); used by the analytic MQ reward.
double gm_log_density(const GaussianMixtureTarget& target, const Vec& x);

class GmDenoiser : public DenoiserModel {
 public:
  GmDenoiser(GaussianMixtureTarget target, const NoiseSchedule* schedule)
      : target_(std::move(target)), schedule_(schedule) {
    target_.validate();
  }

  Vec predict_noise(const Vec& x, std::size_t t,
                    const PromptSpec&) const override {
    return gm_predict_noise(target_, *schedule_, x, t);
  }
  std::size_t dim() const override { return target_.dim; }
  const GaussianMixtureTarget& target() const { return target_; }

 private:
  GaussianMixtureTarget target_;
  const NoiseSchedule* schedule_;
};

// Eq. 1. x̂0 = (x_t − sigma_t·eps)/zeta_t; direction term is
// √(1−η²)·eps + η·branch_noise (exactly eps at η = 0). branch_noise is
// required iff eta > 0. NFE is counted at predict_noise call sites.
DiffusionState ddim_step(const DiffusionState& state, const Vec& eps,
                         const NoiseSchedule& schedule, double eta,
                         const Vec* branch_noise = nullptr);

// Deterministic (η=0) completion from state.t down to the data end;
// returns (x̂0, nfe_used = state.t). The input state is not modified.
std::pair<Vec, std::uint64_t> rollout_to_x0(const DiffusionState& state,
                                            const DenoiserModel& model,
                                            const NoiseSchedule& schedule,
                                            const PromptSpec& prompt,
                                            NfeCounter& counter);

}  // namespace imagery
