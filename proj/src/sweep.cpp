#include "imagery/sweep.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include "imagery/diffusion.hpp"
#include "imagery/embedding.hpp"
#include "imagery/error.hpp"
#include "imagery/log.hpp"
#include "imagery/parallel.hpp"
#include "imagery/semantics.hpp"
#include "imagery/text.hpp"

namespace fs = std::filesystem;

namespace imagery {

namespace {

bool valid_label(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::string resolve_path(const std::string& base_dir, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute() || base_dir.empty()) return p;
  return (fs::path(base_dir) / p).string();
}

}  // namespace

void SweepConfig::validate() const {
  if (prompts.empty())
    throw Error(ErrorKind::InvalidConfig, "sweep needs at least one prompt");
  for (const PromptSpec& p : prompts) p.validate();
  if (target_path.empty())
    throw Error(ErrorKind::InvalidConfig, "sweep needs target_path");
  if (configs.empty())
    throw Error(ErrorKind::InvalidConfig, "sweep needs at least one strategy");
  std::set<std::string> labels;
  for (const StrategyConfig& sc : configs) {
    if (!valid_label(sc.label))
      throw Error(ErrorKind::InvalidConfig,
                  "strategy label must match [A-Za-z0-9_-]+: '" + sc.label +
                      "'");
    if (!labels.insert(sc.label).second)
      throw Error(ErrorKind::InvalidConfig,
                  "duplicate strategy label: " + sc.label);
    sc.config.validate();
  }
  if (budgets.empty())
    throw Error(ErrorKind::InvalidConfig, "sweep needs at least one budget");
  for (std::size_t i = 1; i < budgets.size(); ++i)
    if (budgets[i] <= budgets[i - 1])
      throw Error(ErrorKind::InvalidConfig,
                  "budgets must be strictly increasing");
  if (seeds.empty())
    throw Error(ErrorKind::InvalidConfig, "sweep needs at least one seed");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() !=
      seeds.size())
    throw Error(ErrorKind::InvalidConfig, "duplicate sweep seeds");
  // Feasibility: every strategy must fit every budget.
  for (const StrategyConfig& sc : configs)
    for (std::uint64_t b : budgets) (void)fit_to_budget(sc.config, b);
}

json sweep_config_to_json(const SweepConfig& c) {
  json j;
  json parr = json::array();
  for (const PromptSpec& p : c.prompts) parr.push_back(prompt_to_json(p));
  j["prompts"] = std::move(parr);
  if (!c.table_path.empty()) j["table_path"] = c.table_path;
  j["target_path"] = c.target_path;
  j["weights"] = reward_config_to_json(c.weights);
  j["schedule_kind"] = to_string(c.schedule_kind);
  j["mode_index"] = c.mode_index;
  if (!c.external.command.empty()) {
    j["external"] = {{"command", c.external.command},
                     {"timeout_s", c.external.timeout_s}};
  }
  json carr = json::array();
  for (const StrategyConfig& sc : c.configs)
    carr.push_back(
        {{"label", sc.label}, {"search", search_config_to_json(sc.config)}});
  j["configs"] = std::move(carr);
  j["budgets"] = c.budgets;
  j["seeds"] = c.seeds;
  return j;
}

SweepConfig sweep_config_from_json(const json& j,
                                   const std::string& base_dir) {
  if (!j.is_object())
    throw Error(ErrorKind::Parse, "sweep config must be a JSON object");
  SweepConfig c;
  for (const json& pj : require_field(j, "prompts", "sweep config")) {
    if (pj.is_string())
      c.prompts.push_back(
          load_prompt(resolve_path(base_dir, pj.get<std::string>())));
    else
      c.prompts.push_back(prompt_from_json(pj));
  }
  if (j.contains("table_path"))
    c.table_path =
        resolve_path(base_dir, j.at("table_path").get<std::string>());
  c.target_path = resolve_path(
      base_dir,
      require_field(j, "target_path", "sweep config").get<std::string>());
  if (j.contains("weights"))
    c.weights = reward_config_from_json(j.at("weights"));
  if (j.contains("schedule_kind"))
    c.schedule_kind =
        schedule_kind_from_string(j.at("schedule_kind").get<std::string>());
  if (j.contains("mode_index"))
    c.mode_index = j.at("mode_index").get<std::size_t>();
  if (j.contains("external")) {
    const json& e = j.at("external");
    c.external.command = require_field(e, "command", "external reward spec")
                             .get<std::vector<std::string>>();
    if (e.contains("timeout_s"))
      c.external.timeout_s = e.at("timeout_s").get<double>();
  }
  for (const json& sj : require_field(j, "configs", "sweep config")) {
    StrategyConfig sc;
    sc.label = require_field(sj, "label", "strategy entry").get<std::string>();
    sc.config = search_config_from_json(require_field(sj, "search", "strategy entry"));
    c.configs.push_back(std::move(sc));
  }
  c.budgets = require_field(j, "budgets", "sweep config").get<std::vector<std::uint64_t>>();
  c.seeds = require_field(j, "seeds", "sweep config").get<std::vector<std::uint64_t>>();
  c.validate();
  return c;
}

SweepConfig load_sweep_config(const std::string& path) {
  const json j = read_json_file(path);
  return sweep_config_from_json(j, fs::path(path).parent_path().string());
}

std::uint64_t planned_nfe(const SearchConfig& c, double d_sem) {
  c.validate();
  const std::uint64_t T = c.T;
  auto child_cost = [T](std::size_t s) {
    return T - static_cast<std::uint64_t>(s) - 1;  // a child is born at t-1
  };
  std::uint64_t total = 0;
  switch (c.strategy) {
    case Strategy::BestOfN:
      return static_cast<std::uint64_t>(c.n_base) * T;
    case Strategy::Beam:
      total = static_cast<std::uint64_t>(c.n_base) * T;
      for (std::size_t s : c.imagery_schedule)
        total += static_cast<std::uint64_t>(c.n_base) *
                 (c.branch_factor - 1) * child_cost(s);
      return total;
    case Strategy::Particle:
      // Worst case: every resample collapses onto one parent, so n-1
      // duplicates are re-branched at each step.
      total = static_cast<std::uint64_t>(c.n_base) * T;
      for (std::size_t s : c.imagery_schedule)
        total += static_cast<std::uint64_t>(c.n_base - 1) * child_cost(s);
      return total;
    case Strategy::Imagery: {
      const std::size_t P =
          candidate_count(c.size_schedule[0], c.lambda, d_sem);
      total = static_cast<std::uint64_t>(P) * T;
      std::size_t pool = P;  // retention after the previous step
      for (std::size_t i = 0; i < c.imagery_schedule.size(); ++i) {
        if (pool < P) total += (P - pool) * child_cost(c.imagery_schedule[i]);
        pool = std::min(
            P, candidate_count(c.size_schedule[i + 1], c.lambda, d_sem));
      }
      return total;
    }
  }
  throw Error(ErrorKind::InvalidConfig, "unknown strategy");
}

SearchConfig fit_to_budget(const SearchConfig& tmpl, std::uint64_t budget) {
  tmpl.validate();
  const std::uint64_t T = tmpl.T;
  // Pool sizes quantize NFE in whole-trajectory chunks, so enforcement is
  // best-effort: a plan may exceed the budget by at most 5% when that lands
  // the spend closer to the target than the next size down.
  const std::uint64_t cap = budget + budget / 20;
  if (cap < T)
    throw Error(ErrorKind::InvalidConfig,
                "budget " + std::to_string(budget) +
                    " (5% tolerance: " + std::to_string(cap) +
                    ") cannot fund one trajectory of T=" + std::to_string(T));
  std::uint64_t dup = 0;  // cost of one extra child at every branch step
  for (std::size_t s : tmpl.imagery_schedule)
    dup += T - static_cast<std::uint64_t>(s) - 1;

  SearchConfig out = tmpl;
  switch (tmpl.strategy) {
    case Strategy::BestOfN:
      out.n_base = static_cast<std::size_t>(cap / T);
      break;
    case Strategy::Beam: {
      const std::uint64_t per_member =
          T + static_cast<std::uint64_t>(tmpl.branch_factor - 1) * dup;
      if (cap < per_member)
        throw Error(ErrorKind::InvalidConfig,
                    "budget " + std::to_string(budget) +
                        " (5% tolerance: " + std::to_string(cap) +
                        ") below one beam member (" +
                        std::to_string(per_member) + " calls)");
      out.n_base = static_cast<std::size_t>(cap / per_member);
      break;
    }
    case Strategy::Particle:
      // Worst case n*T + (n-1)*dup <= cap.
      out.n_base = static_cast<std::size_t>((cap + dup) / (T + dup));
      break;
    case Strategy::Imagery: {
      const std::vector<std::size_t>& base = tmpl.size_schedule;
      const std::size_t P0 = base[0];
      auto scaled = [&](std::size_t P) {
        std::vector<std::size_t> sizes(base.size());
        sizes[0] = P;
        for (std::size_t i = 1; i < base.size(); ++i)
          sizes[i] = std::min(P, (base[i] * P + P0 - 1) / P0);  // ceil ratio
        return sizes;
      };
      auto cost = [&](std::size_t P) {
        SearchConfig probe = tmpl;
        probe.lambda = 0.0;
        probe.size_schedule = scaled(P);
        return planned_nfe(probe, 0.0);
      };
      std::size_t best = 1;  // cost(1) == T <= cap, checked above
      for (std::size_t P = 2; cost(P) <= cap; ++P) best = P;
      out.size_schedule = scaled(best);
      out.lambda = 0.0;
      break;
    }
  }
  out.validate();
  return out;
}

std::string sweep_config_hash(const SweepConfig& c) {
  const std::uint64_t h = fnv1a64(sweep_config_to_json(c).dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

namespace {

struct Cell {
  std::size_t cfg_idx = 0;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  std::size_t prompt_idx = 0;
};

std::string cell_file_name(const std::string& label, const Cell& cell) {
  return label + "-b" + std::to_string(cell.budget) + "-s" +
         std::to_string(cell.seed) + "-p" + std::to_string(cell.prompt_idx) +
         ".csv";
}

bool try_recover_cell(const fs::path& file, const std::string& label,
                      const Cell& cell, SweepRow& out) {
  std::ifstream in(file);
  if (!in) return false;
  std::string line;
  if (!std::getline(in, line)) return false;
  try {
    SweepRow row = sweep_row_from_csv(line);
    if (row.strategy != label || row.budget != cell.budget ||
        row.seed != cell.seed || row.prompt_index != cell.prompt_idx)
      return false;
    out = std::move(row);
    return true;
  } catch (const Error&) {
    return false;
  }
}

SweepRow run_cell(const SweepConfig& cfg, const std::string& label,
                  const SearchConfig& tmpl, const Cell& cell,
                  const PromptSpec& prompt, double d_sem,
                  const GaussianMixtureTarget& target) {
  SweepRow row;
  row.strategy = label;
  row.budget = cell.budget;
  row.seed = cell.seed;
  row.prompt_index = cell.prompt_idx;
  row.d_sem = d_sem;
  try {
    SearchConfig fitted = fit_to_budget(tmpl, cell.budget);
    fitted.seed = cell.seed;
    const NoiseSchedule sched = make_schedule(fitted.T, cfg.schedule_kind);
    GmDenoiser model(target, &sched);
    std::unique_ptr<RewardModel> reward;
    if (cfg.external.command.empty())
      reward = std::make_unique<AnalyticReward>(target, cfg.mode_index);
    else
      reward = std::make_unique<ExternalRewardModel>(cfg.external);
    SearchContext ctx;
    ctx.model = &model;
    ctx.schedule = &sched;
    ctx.reward = reward.get();
    ctx.reward_config = cfg.weights;
    ctx.prompt = prompt;
    ctx.d_sem = d_sem;
    ctx.workers = 1;  // the sweep parallelises across cells instead
    const RunRecord rec = run_search(fitted, ctx);
    row.reward = rec.winner.reward;
    row.components = rec.winner.components;
    row.nfe_actual = rec.nfe_total;
    row.wall_time = rec.wall_time;
  } catch (const Error& e) {
    log_warn("sweep cell " + cell_file_name(label, cell) + " failed (" +
             std::string(to_string(e.kind())) + "): " + e.what());
    row = SweepRow{};
    row.strategy = label;
    row.budget = cell.budget;
    row.seed = cell.seed;
    row.prompt_index = cell.prompt_idx;
    row.d_sem = d_sem;
    row.failed = true;
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& c,
                                const std::string& out_dir,
                                std::size_t workers) {
  c.validate();
  // Hash before any d_sem caching mutates the prompt objects.
  const std::string hash = sweep_config_hash(c);

  const GaussianMixtureTarget target = load_target(c.target_path);
  if (c.external.command.empty() &&
      c.mode_index >= target.components.size())
    throw Error(ErrorKind::InvalidConfig,
                "mode_index " + std::to_string(c.mode_index) +
                    " out of range for target with " +
                    std::to_string(target.components.size()) + " modes");
  EmbeddingTable table;
  if (!c.table_path.empty()) table = load_embedding_table(c.table_path);

  // Explicit prompt d_sem wins; otherwise resolve Eq. 2 once per prompt.
  std::vector<PromptSpec> prompts = c.prompts;
  std::vector<double> d_sems(prompts.size(), 0.0);
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    if (prompts[i].d_sem.has_value())
      d_sems[i] = *prompts[i].d_sem;
    else
      d_sems[i] = semantic_distance_or_zero(prompts[i], table).value;
  }

  // Canonical cell order: label, budget, seed, prompt index, ascending.
  std::vector<std::size_t> cfg_order(c.configs.size());
  std::iota(cfg_order.begin(), cfg_order.end(), std::size_t{0});
  std::sort(cfg_order.begin(), cfg_order.end(),
            [&](std::size_t a, std::size_t b) {
              return c.configs[a].label < c.configs[b].label;
            });
  std::vector<std::uint64_t> seeds = c.seeds;
  std::sort(seeds.begin(), seeds.end());

  std::vector<Cell> cells;
  for (std::size_t ci : cfg_order)
    for (std::uint64_t b : c.budgets)
      for (std::uint64_t s : seeds)
        for (std::size_t p = 0; p < prompts.size(); ++p)
          cells.push_back({ci, b, s, p});

  const fs::path cell_dir = fs::path(out_dir) / ("cells-" + hash);
  std::error_code ec;
  fs::create_directories(cell_dir, ec);
  if (ec)
    throw Error(ErrorKind::Io,
                "cannot create " + cell_dir.string() + ": " + ec.message());

  log_info("sweep: running " + std::to_string(cells.size()) + " cells (" +
           std::to_string(workers) + " workers), checkpoints in " +
           cell_dir.string());

  std::vector<SweepRow> rows(cells.size());
  parallel_for(cells.size(), workers, [&](std::size_t idx) {
    const Cell& cell = cells[idx];
    const std::string& label = c.configs[cell.cfg_idx].label;
    const fs::path file = cell_dir / cell_file_name(label, cell);
    if (try_recover_cell(file, label, cell, rows[idx])) return;
    rows[idx] = run_cell(c, label, c.configs[cell.cfg_idx].config, cell,
                         prompts[cell.prompt_idx], d_sems[cell.prompt_idx],
                         target);
    std::ofstream out(file, std::ios::trunc);
    if (out) out << sweep_row_to_csv(rows[idx]) << '\n';
  });

  write_rows_csv((fs::path(out_dir) / "rows.csv").string(), rows);
  return rows;
}

}  // namespace imagery
