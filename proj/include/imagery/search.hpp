#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imagery/diffusion.hpp"
#include "imagery/json_util.hpp"
#include "imagery/prompt.hpp"
#include "imagery/rewards.hpp"

namespace imagery {

enum class Strategy { Imagery, BestOfN, Particle, Beam };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

// Published imagery schedules: "default" = {5, 10, 20, 45},
// "alt" = {5, 20, 30, 45} (denoising steps counted from the noise end).
std::vector<std::size_t> imagery_schedule_preset(const std::string& name);

struct SearchConfig {
  std::size_t n_base = 1;
  double lambda = 1.0;
  std::vector<std::size_t> imagery_schedule;  // steps from the noise end
  std::vector<std::size_t> size_schedule;     // [initial pool, retentions...]
  double eta_branch = 0.5;
  std::size_t T = 50;
  Strategy strategy = Strategy::Imagery;
  std::uint64_t seed = 0;
  std::size_t branch_factor = 2;  // beam only
  double temperature = 1.0;       // particle softmax only

  // Throws InvalidConfig. The size_schedule length rule (one entry more
  // than imagery_schedule) binds only for the imagery strategy; baselines
  // reuse imagery_schedule as their expand/resample steps.
  void validate() const;
};

json search_config_to_json(const SearchConfig& c);
// Accepts "schedule_preset": "default"|"alt" in place of imagery_schedule.
SearchConfig search_config_from_json(const json& j);

// Eq. 3: ceil(n_base · (1 + lambda · d_sem)), with a 1e-9 slack inside the
// ceiling so exact products do not round up through float error.
std::size_t candidate_count(std::size_t n_base, double lambda, double d_sem);

// softmax(reward / temperature); -inf rewards get weight 0.
std::vector<double> softmax_weights(const std::vector<double>& rewards,
                                    double temperature);

// Systematic resampling: counts per parent for positions (u0 + j)/n.
std::vector<std::size_t> systematic_resample(const std::vector<double>& weights,
                                             std::size_t n, double u0);

struct PoolEntry {
  std::uint64_t id = 0;
  std::int64_t parent = -1;  // -1 for initial candidates
  std::size_t step = 0;      // schedule step (noise-end units)
  double reward = 0.0;
  std::uint64_t nfe = 0;  // model calls attributable to this candidate
};

struct WinnerInfo {
  std::uint64_t id = 0;
  std::int64_t parent = -1;
  std::uint64_t child_seed = 0;
  double reward = 0.0;
  RewardComponents components;
  Vec x0;
};

struct RunRecord {
  SearchConfig config;
  std::string config_hash;  // fnv1a64 of the canonical config JSON, hex
  PromptSpec prompt;
  double d_sem = 0.0;
  // One snapshot per imagery/expand/resample step: the full evaluated pool
  // before retention (after resampling for the particle strategy).
  std::vector<std::vector<PoolEntry>> pools;
  std::uint64_t nfe_total = 0;
  WinnerInfo winner;
  double wall_time = 0.0;  // seconds; masked in determinism comparisons
};

json run_record_to_json(const RunRecord& r);
void save_run_record(const std::string& path, const RunRecord& r);

struct SearchContext {
  const DenoiserModel* model = nullptr;
  const NoiseSchedule* schedule = nullptr;
  const RewardModel* reward = nullptr;
  RewardConfig reward_config;
  PromptSpec prompt;
  double d_sem = 0.0;  // Eq. 2 value resolved by the caller
  std::size_t workers = 1;
};

// Dispatches on config.strategy. Candidate trajectories are deterministic
// after birth and cached in full, so each candidate costs exactly its birth
// timestep in model calls; lookahead x̂0 scoring reads the cache. Throws
// SearchFailed (payload = partial RunRecord JSON) when an entire pool fails.
RunRecord run_search(const SearchConfig& config, const SearchContext& ctx);

// Named strategy entry points (thin wrappers over run_search).
RunRecord imagery_search(const SearchConfig& config, const SearchContext& ctx);
RunRecord best_of_n(std::size_t n, SearchConfig config,
                    const SearchContext& ctx);
RunRecord particle_sampling(std::size_t n_particles,
                            const std::vector<std::size_t>& resample_steps,
                            SearchConfig config, const SearchContext& ctx);
RunRecord beam_search(std::size_t beam_width, std::size_t branch_factor,
                      const std::vector<std::size_t>& expand_steps,
                      SearchConfig config, const SearchContext& ctx);

}  // namespace imagery
