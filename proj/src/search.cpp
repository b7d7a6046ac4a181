#include "imagery/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "imagery/error.hpp"
#include "imagery/log.hpp"
#include "imagery/parallel.hpp"
#include "imagery/rng.hpp"
#include "imagery/semantics.hpp"
#include "imagery/text.hpp"

namespace imagery {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Imagery: return "imagery";
    case Strategy::BestOfN: return "best-of-n";
    case Strategy::Particle: return "particle";
    case Strategy::Beam: return "beam";
  }
  return "unknown";
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "imagery") return Strategy::Imagery;
  if (s == "best-of-n") return Strategy::BestOfN;
  if (s == "particle") return Strategy::Particle;
  if (s == "beam") return Strategy::Beam;
  throw Error(ErrorKind::Parse, "unknown strategy: " + s);
}

std::vector<std::size_t> imagery_schedule_preset(const std::string& name) {
  if (name == "default") return {5, 10, 20, 45};
  if (name == "alt") return {5, 20, 30, 45};
  throw Error(ErrorKind::InvalidConfig, "unknown schedule preset: " + name);
}

void SearchConfig::validate() const {
  if (n_base < 1)
    throw Error(ErrorKind::InvalidConfig, "config: n_base must be >= 1");
  if (T < 2) throw Error(ErrorKind::InvalidConfig, "config: T must be >= 2");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw Error(ErrorKind::InvalidConfig, "config: lambda must be >= 0");
  if (!(eta_branch > 0.0 && eta_branch <= 1.0))
    throw Error(ErrorKind::InvalidConfig, "config: eta_branch outside (0, 1]");
  if (branch_factor < 1)
    throw Error(ErrorKind::InvalidConfig, "config: branch_factor must be >= 1");
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw Error(ErrorKind::InvalidConfig, "config: temperature must be > 0");
  for (std::size_t i = 0; i < imagery_schedule.size(); ++i) {
    const std::size_t s = imagery_schedule[i];
    if (s < 1 || s > T - 1)
      throw Error(ErrorKind::InvalidConfig,
                  "config: schedule step outside [1, T-1]");
    if (i > 0 && imagery_schedule[i - 1] >= s)
      throw Error(ErrorKind::InvalidConfig,
                  "config: imagery_schedule must be strictly increasing");
  }
  if (strategy == Strategy::Imagery) {
    if (size_schedule.size() != imagery_schedule.size() + 1)
      throw Error(ErrorKind::InvalidConfig,
                  "config: size_schedule needs one entry more than "
                  "imagery_schedule");
    for (std::size_t v : size_schedule)
      if (v < 1)
        throw Error(ErrorKind::InvalidConfig,
                    "config: size_schedule entries must be >= 1");
  }
}

json search_config_to_json(const SearchConfig& c) {
  return json{{"n_base", c.n_base},
              {"lambda", c.lambda},
              {"imagery_schedule", c.imagery_schedule},
              {"size_schedule", c.size_schedule},
              {"eta_branch", c.eta_branch},
              {"T", c.T},
              {"strategy", to_string(c.strategy)},
              {"seed", c.seed},
              {"branch_factor", c.branch_factor},
              {"temperature", c.temperature}};
}

SearchConfig search_config_from_json(const json& j) {
  if (!j.is_object())
    throw Error(ErrorKind::Parse, "search config: expected a JSON object");
  SearchConfig c;
  if (j.contains("n_base")) c.n_base = j["n_base"].get<std::size_t>();
  if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
  if (j.contains("imagery_schedule") && j.contains("schedule_preset"))
    throw Error(ErrorKind::Parse,
                "search config: give imagery_schedule or schedule_preset, "
                "not both");
  if (j.contains("imagery_schedule"))
    c.imagery_schedule = j["imagery_schedule"].get<std::vector<std::size_t>>();
  if (j.contains("schedule_preset"))
    c.imagery_schedule =
        imagery_schedule_preset(j["schedule_preset"].get<std::string>());
  if (j.contains("size_schedule"))
    c.size_schedule = j["size_schedule"].get<std::vector<std::size_t>>();
  if (j.contains("eta_branch")) c.eta_branch = j["eta_branch"].get<double>();
  if (j.contains("T")) c.T = j["T"].get<std::size_t>();
  if (j.contains("strategy"))
    c.strategy = strategy_from_string(j["strategy"].get<std::string>());
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("branch_factor"))
    c.branch_factor = j["branch_factor"].get<std::size_t>();
  if (j.contains("temperature"))
    c.temperature = j["temperature"].get<double>();
  c.validate();
  return c;
}

std::size_t candidate_count(std::size_t n_base, double lambda, double d_sem) {
  if (n_base < 1)
    throw Error(ErrorKind::InvalidInput, "candidate_count: n_base < 1");
  const double v = static_cast<double>(n_base) * (1.0 + lambda * d_sem);
  // 1e-9 slack: exact products like 10 * 1.1 = 11.000000000000002 must not
  // round up an extra candidate.
  return static_cast<std::size_t>(std::ceil(v - 1e-9));
}

std::vector<double> softmax_weights(const std::vector<double>& rewards,
                                    double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw Error(ErrorKind::InvalidConfig,
                "softmax_weights: temperature must be finite and > 0");
  std::vector<double> out(rewards.size(), 0.0);
  double m = kNegInf;
  for (double r : rewards) m = std::max(m, r / temperature);
  if (m == kNegInf) return out;  // every reward -inf: all-zero weights
  double sum = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    out[i] = std::exp(rewards[i] / temperature - m);
    sum += out[i];
  }
  for (double& w : out) w /= sum;
  return out;
}

std::vector<std::size_t> systematic_resample(const std::vector<double>& weights,
                                             std::size_t n, double u0) {
  if (weights.empty() || n == 0)
    throw Error(ErrorKind::InvalidInput, "systematic_resample: empty input");
  if (!(u0 >= 0.0 && u0 < 1.0))
    throw Error(ErrorKind::InvalidInput, "systematic_resample: u0 not in [0,1)");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw Error(ErrorKind::InvalidInput, "systematic_resample: bad weight");
    total += w;
  }
  if (!(total > 0.0))
    throw Error(ErrorKind::InvalidInput,
                "systematic_resample: zero total weight");

  std::vector<std::size_t> counts(weights.size(), 0);
  std::size_t j = 0;
  std::size_t last_positive = 0;
  double cum = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    cum += weights[k] / total;
    if (weights[k] > 0.0) last_positive = k;
    while (j < n &&
           (u0 + static_cast<double>(j)) / static_cast<double>(n) < cum) {
      ++counts[k];
      ++j;
    }
  }
  counts[last_positive] += n - j;  // float leftovers land on the last mode
  return counts;
}

json run_record_to_json(const RunRecord& r) {
  auto num_or_null = [](double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
  };
  json pools = json::array();
  for (const auto& pool : r.pools) {
    json arr = json::array();
    for (const PoolEntry& e : pool)
      arr.push_back({{"id", e.id},
                     {"parent", e.parent},
                     {"step", e.step},
                     {"reward", num_or_null(e.reward)},
                     {"nfe", e.nfe}});
    pools.push_back(std::move(arr));
  }
  json winner;
  if (r.winner.x0.empty()) {
    winner = nullptr;  // partial record: no winner selected
  } else {
    winner = json{{"id", r.winner.id},
                  {"parent", r.winner.parent},
                  {"child_seed", r.winner.child_seed},
                  {"reward", r.winner.reward},
                  {"components",
                   {{"mq", r.winner.components.mq},
                    {"ta", r.winner.components.ta},
                    {"vq", r.winner.components.vq},
                    {"r_any", r.winner.components.r_any}}},
                  {"x0", r.winner.x0}};
  }
  return json{{"config", search_config_to_json(r.config)},
              {"config_hash", r.config_hash},
              {"prompt", prompt_to_json(r.prompt)},
              {"d_sem", r.d_sem},
              {"pools", pools},
              {"nfe_total", r.nfe_total},
              {"winner", winner},
              {"wall_time", r.wall_time}};
}

void save_run_record(const std::string& path, const RunRecord& r) {
  write_json_file(path, run_record_to_json(r));
}

namespace {

std::string config_hash_hex(const SearchConfig& c) {
  const std::uint64_t h = fnv1a64(search_config_to_json(c).dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

// A candidate owns its full deterministic continuation from birth_t down
// to the data end: xs[i] is the state at t = birth_t - i and eps[i] the
// noise prediction consumed there. The final xs entry is x̂0. Trajectories
// never change after birth, so each candidate costs exactly birth_t model
// calls and every later lookahead or advancement is a cache read.
struct Cand {
  std::uint64_t id = 0;
  std::int64_t parent = -1;
  std::uint64_t child_seed = 0;
  std::size_t birth_t = 0;
  std::vector<Vec> xs;
  std::vector<Vec> eps;
  double reward = kNegInf;
  RewardComponents comps;
  bool failed = false;

  const Vec& x_at(std::size_t t) const { return xs[birth_t - t]; }
  const Vec& eps_at(std::size_t t) const { return eps[birth_t - t]; }
  const Vec& x0() const { return xs.back(); }
};

class Engine {
 public:
  Engine(const SearchConfig& cfg, const SearchContext& ctx)
      : cfg_(cfg), ctx_(ctx), weights_(resolve_weights(ctx.reward_config,
                                                       ctx.d_sem)) {
    rec_.config = cfg_;
    rec_.config_hash = config_hash_hex(cfg_);
    rec_.prompt = ctx_.prompt;
    rec_.d_sem = ctx_.d_sem;
  }

  RunRecord run() {
    const auto start = std::chrono::steady_clock::now();
    switch (cfg_.strategy) {
      case Strategy::Imagery: run_imagery(); break;
      case Strategy::BestOfN: run_best_of_n(); break;
      case Strategy::Particle: run_particle(); break;
      case Strategy::Beam: run_beam(); break;
    }
    rec_.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return rec_;
  }

 private:
  void fill_and_score(Cand& c, Vec x_start) {
    c.xs.reserve(c.birth_t + 1);
    c.eps.reserve(c.birth_t);
    c.xs.push_back(std::move(x_start));
    for (std::size_t t = c.birth_t; t >= 1; --t) {
      Vec e = ctx_.model->predict_noise(c.xs.back(), t, ctx_.prompt);
      nfe_.add(1);
      DiffusionState st;
      st.x = c.xs.back();
      st.t = t;
      DiffusionState next = ddim_step(st, e, *ctx_.schedule, 0.0, nullptr);
      c.eps.push_back(std::move(e));
      c.xs.push_back(std::move(next.x));
    }
    try {
      c.comps = ctx_.reward->score(c.x0(), ctx_.prompt);
      c.reward = reward_air(c.comps, weights_, ctx_.d_sem);
    } catch (const Error& e) {
      log_warn("candidate " + std::to_string(c.id) +
               " demoted, reward failed: " + e.what());
      c.comps = {};
      c.reward = kNegInf;
      c.failed = true;
    }
  }

  std::vector<Cand> make_initial_pool(std::size_t n) {
    std::vector<Cand> pool(n);
    const std::size_t dim = ctx_.model->dim();
    for (std::size_t i = 0; i < n; ++i) {
      pool[i].id = next_id_++;
      pool[i].child_seed = mix_seed(cfg_.seed, 0, 0, i);
      pool[i].birth_t = cfg_.T;
    }
    parallel_for(n, ctx_.workers, [&](std::size_t i) {
      Rng rng(pool[i].child_seed);
      Vec x(dim);
      rng.fill_normal(x.data(), dim);
      fill_and_score(pool[i], std::move(x));
    });
    return pool;
  }

  // plan entries are (pool index of parent, per-parent child index); the
  // branch happens on the transition t -> t-1, reusing the parent's cached
  // eps at t, so a child costs t-1 model calls.
  std::vector<Cand> make_children(
      const std::vector<std::pair<std::size_t, std::size_t>>& plan,
      std::size_t t) {
    std::vector<Cand> kids(plan.size());
    const std::size_t dim = ctx_.model->dim();
    for (std::size_t j = 0; j < plan.size(); ++j) {
      const Cand& par = pool_[plan[j].first];
      kids[j].id = next_id_++;
      kids[j].parent = static_cast<std::int64_t>(par.id);
      kids[j].child_seed = mix_seed(cfg_.seed, t, par.id, plan[j].second);
      kids[j].birth_t = t - 1;
    }
    parallel_for(kids.size(), ctx_.workers, [&](std::size_t j) {
      const Cand& par = pool_[plan[j].first];
      Rng rng(kids[j].child_seed);
      Vec noise(dim);
      rng.fill_normal(noise.data(), dim);
      DiffusionState st;
      st.x = par.x_at(t);
      st.t = t;
      DiffusionState branched =
          ddim_step(st, par.eps_at(t), *ctx_.schedule, cfg_.eta_branch, &noise);
      fill_and_score(kids[j], std::move(branched.x));
    });
    return kids;
  }

  void snapshot(std::size_t step) {
    std::vector<PoolEntry> entries;
    entries.reserve(pool_.size());
    for (const Cand& c : pool_)
      entries.push_back({c.id, c.parent, step, c.reward, c.birth_t});
    rec_.pools.push_back(std::move(entries));
  }

  void ensure_some_alive() {
    for (const Cand& c : pool_)
      if (!c.failed) return;
    rec_.nfe_total = nfe_.value();
    throw Error(ErrorKind::SearchFailed, "every candidate in the pool failed",
                run_record_to_json(rec_).dump());
  }

  void retain(std::size_t k) {
    std::sort(pool_.begin(), pool_.end(), [](const Cand& a, const Cand& b) {
      if (a.reward != b.reward) return a.reward > b.reward;
      return a.id < b.id;
    });
    if (pool_.size() > k) pool_.resize(k);
  }

  void finish_with_argmax() {
    ensure_some_alive();
    const Cand* best = nullptr;
    for (const Cand& c : pool_) {
      if (c.failed) continue;
      if (!best || c.reward > best->reward ||
          (c.reward == best->reward && c.id < best->id))
        best = &c;
    }
    rec_.winner = {best->id,   best->parent, best->child_seed,
                   best->reward, best->comps,  best->x0()};
    rec_.nfe_total = nfe_.value();
  }

  void run_imagery() {
    const std::size_t P =
        candidate_count(cfg_.size_schedule[0], cfg_.lambda, ctx_.d_sem);
    pool_ = make_initial_pool(P);
    ensure_some_alive();
    for (std::size_t i = 0; i < cfg_.imagery_schedule.size(); ++i) {
      const std::size_t step = cfg_.imagery_schedule[i];
      const std::size_t t = cfg_.T - step;
      std::vector<std::pair<std::size_t, std::size_t>> plan;
      if (pool_.size() < P) {
        std::vector<std::size_t> per_parent(pool_.size(), 0);
        const std::size_t need = P - pool_.size();
        for (std::size_t j = 0; j < need; ++j) {
          const std::size_t pi = j % pool_.size();
          plan.emplace_back(pi, per_parent[pi]++);
        }
      }
      std::vector<Cand> kids = make_children(plan, t);
      for (Cand& k : kids) pool_.push_back(std::move(k));
      snapshot(step);
      ensure_some_alive();
      retain(candidate_count(cfg_.size_schedule[i + 1], cfg_.lambda,
                             ctx_.d_sem));
    }
    finish_with_argmax();
  }

  void run_best_of_n() {
    pool_ = make_initial_pool(cfg_.n_base);
    finish_with_argmax();
  }

  void run_beam() {
    pool_ = make_initial_pool(cfg_.n_base);
    ensure_some_alive();
    for (std::size_t step : cfg_.imagery_schedule) {
      const std::size_t t = cfg_.T - step;
      // Child 0 of every beam member is its own deterministic continuation
      // (already cached); only children 1..f-1 are stochastic branches.
      std::vector<std::pair<std::size_t, std::size_t>> plan;
      for (std::size_t pi = 0; pi < pool_.size(); ++pi)
        for (std::size_t k = 0; k + 1 < cfg_.branch_factor; ++k)
          plan.emplace_back(pi, k);
      std::vector<Cand> kids = make_children(plan, t);
      for (Cand& k : kids) pool_.push_back(std::move(k));
      snapshot(step);
      ensure_some_alive();
      retain(cfg_.n_base);
    }
    finish_with_argmax();
  }

  void run_particle() {
    const std::size_t n = cfg_.n_base;
    pool_ = make_initial_pool(n);
    ensure_some_alive();
    for (std::size_t step : cfg_.imagery_schedule) {
      const std::size_t t = cfg_.T - step;
      std::vector<double> rewards(pool_.size());
      for (std::size_t i = 0; i < pool_.size(); ++i)
        rewards[i] = pool_[i].reward;
      const std::vector<double> w = softmax_weights(rewards, cfg_.temperature);
      Rng u_rng(mix_seed(cfg_.seed, t, ~std::uint64_t{0}, 0));
      const std::vector<std::size_t> counts =
          systematic_resample(w, n, u_rng.next_double());

      // The first copy of a parent continues deterministically; duplicates
      // are decorrelated through an eta-mixed re-noising branch.
      std::vector<std::pair<std::size_t, std::size_t>> plan;
      for (std::size_t pi = 0; pi < counts.size(); ++pi)
        for (std::size_t k = 0; k + 1 < counts[pi]; ++k)
          plan.emplace_back(pi, k);
      std::vector<Cand> kids = make_children(plan, t);

      std::vector<Cand> next;
      next.reserve(n);
      std::size_t kid_at = 0;
      for (std::size_t pi = 0; pi < counts.size(); ++pi) {
        if (counts[pi] == 0) continue;
        next.push_back(std::move(pool_[pi]));
        for (std::size_t k = 0; k + 1 < counts[pi]; ++k)
          next.push_back(std::move(kids[kid_at++]));
      }
      pool_ = std::move(next);
      snapshot(step);
      ensure_some_alive();
    }
    finish_with_argmax();
  }

  const SearchConfig& cfg_;
  const SearchContext& ctx_;
  RewardWeights weights_;
  NfeCounter nfe_;
  std::uint64_t next_id_ = 0;
  std::vector<Cand> pool_;
  RunRecord rec_;
};

}  // namespace

RunRecord run_search(const SearchConfig& config, const SearchContext& ctx) {
  config.validate();
  if (!ctx.model || !ctx.schedule || !ctx.reward)
    throw Error(ErrorKind::InvalidConfig, "search context incomplete");
  if (ctx.schedule->T != config.T)
    throw Error(ErrorKind::InvalidConfig, "schedule T != config T");
  if (!(ctx.d_sem >= 0.0) || !std::isfinite(ctx.d_sem))
    throw Error(ErrorKind::InvalidInput, "d_sem must be finite and >= 0");
  Engine engine(config, ctx);
  return engine.run();
}

RunRecord imagery_search(const SearchConfig& config, const SearchContext& ctx) {
  SearchConfig c = config;
  c.strategy = Strategy::Imagery;
  return run_search(c, ctx);
}

RunRecord best_of_n(std::size_t n, SearchConfig config,
                    const SearchContext& ctx) {
  config.strategy = Strategy::BestOfN;
  config.n_base = n;
  return run_search(config, ctx);
}

RunRecord particle_sampling(std::size_t n_particles,
                            const std::vector<std::size_t>& resample_steps,
                            SearchConfig config, const SearchContext& ctx) {
  config.strategy = Strategy::Particle;
  config.n_base = n_particles;
  config.imagery_schedule = resample_steps;
  return run_search(config, ctx);
}

RunRecord beam_search(std::size_t beam_width, std::size_t branch_factor,
                      const std::vector<std::size_t>& expand_steps,
                      SearchConfig config, const SearchContext& ctx) {
  config.strategy = Strategy::Beam;
  config.n_base = beam_width;
  config.branch_factor = branch_factor;
  config.imagery_schedule = expand_steps;
  return run_search(config, ctx);
}

}  // namespace imagery
