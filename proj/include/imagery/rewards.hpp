#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "imagery/diffusion.hpp"
#include "imagery/json_util.hpp"
#include "imagery/prompt.hpp"

namespace imagery {

struct RewardComponents {
  double mq = 0.0;
  double ta = 0.0;
  double vq = 0.0;
  double r_any = 0.0;
};

// Eq. 4 scale factors with alpha already resolved (see dynamic_alpha).
struct RewardWeights {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double omega = 0.0;
  double d_floor = 1e-3;
};

// Weights-file schema {"alpha_base","kappa","beta","gamma","omega",
// "d_floor"}; every field optional with these defaults.
struct RewardConfig {
  double alpha_base = 1.0;
  double kappa = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double omega = 0.0;
  double d_floor = 1e-3;
};

RewardConfig reward_config_from_json(const json& j);
json reward_config_to_json(const RewardConfig& rc);

// alpha = alpha_base · (1 + kappa · d_sem), mirroring the Eq. 3 form.
double dynamic_alpha(double d_sem, double alpha_base, double kappa);

RewardWeights resolve_weights(const RewardConfig& rc, double d_sem);

// Eq. 4: (α·mq + β·ta + γ·vq + ω·r_any) · max(d_sem, d_floor). The floor
// keeps ranking meaningful for degenerate (d_sem = 0) prompts.
double reward_air(const RewardComponents& c, const RewardWeights& w,
                  double d_sem);

class RewardModel {
 public:
  virtual ~RewardModel() = default;
  virtual RewardComponents score(const Vec& x0,
                                 const PromptSpec& prompt) const = 0;
};

// Testbed stand-ins: mq = mixture log-density at x0; ta = −‖x0 − μ_mode‖₂;
// vq = −max(‖x0‖∞ − clip, 0); r_any = 0.
RewardComponents analytic_reward(const Vec& x0,
                                 const GaussianMixtureTarget& target,
                                 std::size_t mode_index, double clip = 10.0);

class AnalyticReward : public RewardModel {
 public:
  AnalyticReward(GaussianMixtureTarget target, std::size_t mode_index,
                 double clip = 10.0);

  RewardComponents score(const Vec& x0, const PromptSpec&) const override {
    return analytic_reward(x0, target_, mode_index_, clip_);
  }

 private:
  GaussianMixtureTarget target_;
  std::size_t mode_index_;
  double clip_;
};

struct ExternalRewardSpec {
  std::vector<std::string> command;  // argv; the temp-file path is appended
  double timeout_s = 10.0;
};

// Protocol: write {"x0": [f,...], "prompt": str} to a temp file, invoke the
// command with that path as final argument, parse one JSON object
// {"mq": f, "ta": f, "vq": f, "r_any": f} from its standard output.
// Nonzero exit, timeout, or malformed output raise ExternalReward errors
// whose payload carries the captured output.
RewardComponents external_reward(const ExternalRewardSpec& spec, const Vec& x0,
                                 const PromptSpec& prompt);

class ExternalRewardModel : public RewardModel {
 public:
  explicit ExternalRewardModel(ExternalRewardSpec spec)
      : spec_(std::move(spec)) {}

  RewardComponents score(const Vec& x0, const PromptSpec& p) const override {
    return external_reward(spec_, x0, p);
  }

 private:
  ExternalRewardSpec spec_;
};

}  // namespace imagery
