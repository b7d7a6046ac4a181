#include "imagery/diffusion.hpp"

#include <cmath>

#include "imagery/error.hpp"
#include "imagery/json_util.hpp"
#include "imagery/kernels.hpp"

namespace imagery {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
}

void GaussianMixtureTarget::validate() const {
  if (dim < 1)
    throw Error(ErrorKind::InvalidInput, "target: dim < 1");
  if (components.empty())
    throw Error(ErrorKind::InvalidInput, "target: no components");
  double wsum = 0.0;
  for (const GmComponent& c : components) {
    if (!(c.w > 0.0) || !std::isfinite(c.w))
      throw Error(ErrorKind::InvalidInput, "target: weights must be > 0");
    if (c.mu.size() != dim)
      throw Error(ErrorKind::InvalidInput, "target: mu dim mismatch");
    for (double m : c.mu)
      if (!std::isfinite(m))
        throw Error(ErrorKind::InvalidInput, "target: non-finite mu");
    if (!(c.s >= 0.0) || !std::isfinite(c.s))
      throw Error(ErrorKind::InvalidInput, "target: s must be >= 0");
    wsum += c.w;
  }
  if (std::fabs(wsum - 1.0) > 1e-12)
    throw Error(ErrorKind::InvalidInput, "target: weights must sum to 1");
}

GaussianMixtureTarget load_target(const std::string& path) {
  json j = read_json_file(path);
  GaussianMixtureTarget t;
  t.dim = require_field(j, "dim", "target").get<std::size_t>();
  for (const auto& c : require_field(j, "components", "target")) {
    GmComponent gc;
    gc.w = require_field(c, "w", "target component").get<double>();
    gc.mu = require_field(c, "mu", "target component").get<Vec>();
    gc.s = require_field(c, "s", "target component").get<double>();
    t.components.push_back(std::move(gc));
  }
  t.validate();
  return t;
}

Vec gm_predict_noise(const GaussianMixtureTarget& target,
                     const NoiseSchedule& schedule, const Vec& x,
                     std::size_t t) {
  if (t < 1 || t > schedule.T)
    throw Error(ErrorKind::InvalidInput, "gm_predict_noise: t out of range");
  if (x.size() != target.dim)
    throw Error(ErrorKind::InvalidInput, "gm_predict_noise: dim mismatch");
  const double zeta = schedule.zeta[t];
  const double sigma = schedule.sigma[t];
  if (sigma == 0.0)
    throw Error(ErrorKind::DivisionByZero,
                "gm_predict_noise: sigma_t = 0 (data end)");

  const std::size_t K = target.components.size();
  const std::size_t d = target.dim;
  std::vector<double> logr(K);
  Vec diff(d);
  double logr_max = -1e300;
  for (std::size_t k = 0; k < K; ++k) {
    const GmComponent& c = target.components[k];
    const double v = zeta * zeta * c.s * c.s + sigma * sigma;
    kern::axpby(diff.data(), 1.0, x.data(), -zeta, c.mu.data(), d);
    const double q = kern::sq_norm(diff.data(), d);
    logr[k] = std::log(c.w) -
              0.5 * static_cast<double>(d) * (kLog2Pi + std::log(v)) -
              0.5 * q / v;
    if (logr[k] > logr_max) logr_max = logr[k];
  }
  double rsum = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    logr[k] = std::exp(logr[k] - logr_max);
    rsum += logr[k];
  }

  // E[x0 | x_t] = sum_k r_k (zeta s_k^2 x + sigma^2 mu_k) / v_k
  Vec e(d, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const GmComponent& c = target.components[k];
    const double v = zeta * zeta * c.s * c.s + sigma * sigma;
    const double r = logr[k] / rsum;
    kern::axpy(e.data(), r * zeta * c.s * c.s / v, x.data(), d);
    kern::axpy(e.data(), r * sigma * sigma / v, c.mu.data(), d);
  }

  Vec eps(d);
  kern::axpby(eps.data(), 1.0 / sigma, x.data(), -zeta / sigma, e.data(), d);
  return eps;
}

double gm_log_density(const GaussianMixtureTarget& target, const Vec& x) {
  if (x.size() != target.dim)
    throw Error(ErrorKind::InvalidInput, "gm_log_density: dim mismatch");
  const std::size_t d = target.dim;
  Vec diff(d);
  double best = -1e300;
  std::vector<double> lp(target.components.size());
  for (std::size_t k = 0; k < target.components.size(); ++k) {
    const GmComponent& c = target.components[k];
    const double s = std::max(c.s, 1e-9);
    kern::axpby(diff.data(), 1.0, x.data(), -1.0, c.mu.data(), d);
    const double q = kern::sq_norm(diff.data(), d);
    lp[k] = std::log(c.w) -
            0.5 * static_cast<double>(d) * (kLog2Pi + 2.0 * std::log(s)) -
            0.5 * q / (s * s);
    if (lp[k] > best) best = lp[k];
  }
  double acc = 0.0;
  for (double v : lp) acc += std::exp(v - best);
  return best + std::log(acc);
}

DiffusionState ddim_step(const DiffusionState& state, const Vec& eps,
                         const NoiseSchedule& schedule, double eta,
                         const Vec* branch_noise) {
  if (state.t < 1 || state.t > schedule.T)
    throw Error(ErrorKind::InvalidInput, "ddim_step: t out of range");
  if (eps.size() != state.x.size())
    throw Error(ErrorKind::InvalidInput, "ddim_step: eps dim mismatch");
  if (eta < 0.0 || eta > 1.0)
    throw Error(ErrorKind::InvalidInput, "ddim_step: eta outside [0, 1]");
  if (eta > 0.0 && branch_noise == nullptr)
    throw Error(ErrorKind::InvalidInput,
                "ddim_step: eta > 0 requires branch_noise");

  const std::size_t t = state.t;
  const std::size_t n = state.x.size();
  const double zt = schedule.zeta[t], st = schedule.sigma[t];
  const double zp = schedule.zeta[t - 1], sp = schedule.sigma[t - 1];

  Vec x0(n);
  kern::axpby(x0.data(), 1.0 / zt, state.x.data(), -st / zt, eps.data(), n);

  DiffusionState out;
  out.t = t - 1;
  out.nfe_so_far = state.nfe_so_far;
  out.x.resize(n);
  if (eta == 0.0) {
    kern::axpby(out.x.data(), zp, x0.data(), sp, eps.data(), n);
  } else {
    if (branch_noise->size() != n)
      throw Error(ErrorKind::InvalidInput, "ddim_step: noise dim mismatch");
    const double c = std::sqrt(1.0 - eta * eta);
    kern::axpby(out.x.data(), zp, x0.data(), sp * c, eps.data(), n);
    kern::axpy(out.x.data(), sp * eta, branch_noise->data(), n);
  }
  return out;
}

std::pair<Vec, std::uint64_t> rollout_to_x0(const DiffusionState& state,
                                            const DenoiserModel& model,
                                            const NoiseSchedule& schedule,
                                            const PromptSpec& prompt,
                                            NfeCounter& counter) {
  if (state.t < 1)
    throw Error(ErrorKind::InvalidInput, "rollout_to_x0: t must be >= 1");
  DiffusionState cur = state;
  std::uint64_t used = 0;
  while (cur.t >= 1) {
    Vec eps;
    try {
      eps = model.predict_noise(cur.x, cur.t, prompt);
    } catch (const Error& e) {
      Error wrapped(e.kind(), std::string(e.what()) + " (rollout at t=" +
                                  std::to_string(cur.t) + ")",
                    e.payload());
      wrapped.rank = e.rank;
      throw wrapped;
    }
    counter.add(1);
    ++used;
    cur = ddim_step(cur, eps, schedule, 0.0, nullptr);
  }
  return {std::move(cur.x), used};
}

}  // namespace imagery
