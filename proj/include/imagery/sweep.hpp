#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imagery/csv.hpp"
#include "imagery/json_util.hpp"
#include "imagery/prompt.hpp"
#include "imagery/rewards.hpp"
#include "imagery/schedule.hpp"
#include "imagery/search.hpp"

namespace imagery {

// One strategy column of a sweep. The label must match [A-Za-z0-9_-]+ so it
// can appear bare in CSV rows and recovery-file names.
struct StrategyConfig {
  std::string label;
  SearchConfig config;
};

struct SweepConfig {
  std::vector<PromptSpec> prompts;
  std::string table_path;  // empty -> toy embedder only
  std::string target_path;
  RewardConfig weights;
  ScheduleKind schedule_kind = ScheduleKind::LinearAlphaBar;
  std::size_t mode_index = 0;     // analytic-reward target mode
  ExternalRewardSpec external;    // empty command -> analytic testbed reward
  std::vector<StrategyConfig> configs;
  std::vector<std::uint64_t> budgets;  // model-call targets, strictly rising
  std::vector<std::uint64_t> seeds;

  // Throws InvalidConfig; includes a feasibility pass that fits every
  // strategy to every budget.
  void validate() const;
};

json sweep_config_to_json(const SweepConfig& c);
// base_dir resolves relative table/target/prompt paths; prompts given as
// path strings are loaded eagerly so the config is self-contained.
SweepConfig sweep_config_from_json(const json& j, const std::string& base_dir);
SweepConfig load_sweep_config(const std::string& path);

// Model calls the engine will spend on this config: exact for best-of-n,
// beam, and imagery; the resampling worst case for particle.
std::uint64_t planned_nfe(const SearchConfig& c, double d_sem);

// Returns a copy of tmpl scaled to the budget. Pool sizes quantize model
// calls (one trajectory costs T at once), so enforcement is best-effort:
// the fitted plan may overshoot the budget by at most 5% when the next
// pool step lands inside that tolerance and gets closer to the target.
// Best-of-n/beam/particle scale n_base; imagery rescales the whole size
// schedule by the largest feasible ratio and freezes lambda at 0 so the
// planned cost no longer depends on the prompt. Throws InvalidConfig when
// even the smallest variant exceeds the tolerance-extended budget.
SearchConfig fit_to_budget(const SearchConfig& tmpl, std::uint64_t budget);

// fnv1a64 of the canonical config JSON, as 16 hex digits. Names the
// recovery directory so stale cells from an edited config never match.
std::string sweep_config_hash(const SweepConfig& c);

// Runs every (strategy, budget, seed, prompt) cell, parallelised over cells
// (each cell runs its engine single-threaded). Rows come back in canonical
// order: label, budget, seed, prompt index, all ascending. Finished cells
// are checkpointed under <out_dir>/cells-<hash>/ and reused on rerun; a
// cell that throws becomes a zeroed row with failed=1 and the sweep goes
// on. Also writes <out_dir>/rows.csv.
std::vector<SweepRow> run_sweep(const SweepConfig& c,
                                const std::string& out_dir,
                                std::size_t workers = 1);

}  // namespace imagery
