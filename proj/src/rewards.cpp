#include "imagery/rewards.hpp"

#include <cmath>

#include "imagery/error.hpp"
#include "imagery/kernels.hpp"

namespace imagery {

RewardConfig reward_config_from_json(const json& j) {
  if (!j.is_object())
    throw Error(ErrorKind::Parse, "weights: expected a JSON object");
  RewardConfig rc;
  auto take = [&](const char* key, double& slot) {
    if (j.contains(key)) {
      slot = j[key].get<double>();
      if (!std::isfinite(slot))
        throw Error(ErrorKind::Parse, std::string("weights: non-finite ") + key);
    }
  };
  take("alpha_base", rc.alpha_base);
  take("kappa", rc.kappa);
  take("beta", rc.beta);
  take("gamma", rc.gamma);
  take("omega", rc.omega);
  take("d_floor", rc.d_floor);
  if (!(rc.d_floor > 0.0))
    throw Error(ErrorKind::InvalidConfig, "weights: d_floor must be > 0");
  return rc;
}

json reward_config_to_json(const RewardConfig& rc) {
  return json{{"alpha_base", rc.alpha_base}, {"kappa", rc.kappa},
              {"beta", rc.beta},             {"gamma", rc.gamma},
              {"omega", rc.omega},           {"d_floor", rc.d_floor}};
}

double dynamic_alpha(double d_sem, double alpha_base, double kappa) {
  return alpha_base * (1.0 + kappa * d_sem);
}

RewardWeights resolve_weights(const RewardConfig& rc, double d_sem) {
  RewardWeights w;
  w.alpha = dynamic_alpha(d_sem, rc.alpha_base, rc.kappa);
  w.beta = rc.beta;
  w.gamma = rc.gamma;
  w.omega = rc.omega;
  w.d_floor = rc.d_floor;
  return w;
}

double reward_air(const RewardComponents& c, const RewardWeights& w,
                  double d_sem) {
  if (!std::isfinite(c.mq) || !std::isfinite(c.ta) || !std::isfinite(c.vq) ||
      !std::isfinite(c.r_any))
    throw Error(ErrorKind::InvalidInput, "reward_air: non-finite components");
  if (!std::isfinite(d_sem) || d_sem < 0.0)
    throw Error(ErrorKind::InvalidInput, "reward_air: bad d_sem");
  const double weighted =
      w.alpha * c.mq + w.beta * c.ta + w.gamma * c.vq + w.omega * c.r_any;
  return weighted * std::max(d_sem, w.d_floor);
}

RewardComponents analytic_reward(const Vec& x0,
                                 const GaussianMixtureTarget& target,
                                 std::size_t mode_index, double clip) {
  if (mode_index >= target.components.size())
    throw Error(ErrorKind::InvalidInput, "analytic_reward: bad mode_index");
  if (x0.size() != target.dim)
    throw Error(ErrorKind::InvalidInput, "analytic_reward: dim mismatch");
  RewardComponents c;
  c.mq = gm_log_density(target, x0);
  const Vec& mu = target.components[mode_index].mu;
  c.ta = -std::sqrt(kern::sq_dist(x0.data(), mu.data(), x0.size()));
  c.vq = -std::max(kern::max_abs(x0.data(), x0.size()) - clip, 0.0);
  c.r_any = 0.0;
  return c;
}

AnalyticReward::AnalyticReward(GaussianMixtureTarget target,
                               std::size_t mode_index, double clip)
    : target_(std::move(target)), mode_index_(mode_index), clip_(clip) {
  target_.validate();
  if (mode_index_ >= target_.components.size())
    throw Error(ErrorKind::InvalidConfig, "AnalyticReward: bad mode_index");
}

}  // namespace imagery
