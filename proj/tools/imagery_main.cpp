// imagery — reward-guided test-time search for diffusion samplers.
//
// Subcommands:
//   bench build      render a distant-concept prompt suite from a catalog
//   search run       run one search strategy on one prompt
//   sweep run        run a strategy x budget x seed x prompt grid
//   report           aggregate a sweep rows.csv into report.md + plot.csv
//   semantics score  print the Eq. 2 semantic distance of a prompt

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imagery/bench.hpp"
#include "imagery/diffusion.hpp"
#include "imagery/embedding.hpp"
#include "imagery/error.hpp"
#include "imagery/kernels.hpp"
#include "imagery/log.hpp"
#include "imagery/report.hpp"
#include "imagery/rewards.hpp"
#include "imagery/schedule.hpp"
#include "imagery/search.hpp"
#include "imagery/semantics.hpp"
#include "imagery/sweep.hpp"

namespace fs = std::filesystem;
using namespace imagery;

namespace {

std::string resolve_in(const std::string& base_dir, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute() || base_dir.empty()) return p;
  return (fs::path(base_dir) / p).string();
}

// Relative output paths land under $IMAGERY_OUT_DIR when it is set.
std::string out_path(const std::string& p) {
  const char* env = std::getenv("IMAGERY_OUT_DIR");
  if (!env || !*env || p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(env) / p).string();
}

void ensure_parent_dir(const std::string& file) {
  const fs::path parent = fs::path(file).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec)
    throw Error(ErrorKind::Io,
                "cannot create " + parent.string() + ": " + ec.message());
}

PairKind pair_kind_from_string(const std::string& s) {
  if (s == "object-action") return PairKind::ObjectAction;
  if (s == "action-action") return PairKind::ActionAction;
  throw Error(ErrorKind::InvalidConfig, "unknown pair kind: " + s);
}

int cmd_bench_build(const std::string& catalog_path,
                    const std::string& table_path, const std::string& kind,
                    const std::string& template_id, std::size_t top_k,
                    const std::string& out) {
  const ConceptCatalog catalog = load_catalog(catalog_path);
  EmbeddingTable table;
  if (!table_path.empty()) table = load_embedding_table(table_path);
  const DistantPairs dp =
      build_distant_pairs(catalog, table, pair_kind_from_string(kind), top_k);
  SuiteManifest manifest = render_prompts(dp.pairs, template_id);
  manifest.short_of_top_k = dp.short_of_top_k;
  const std::string target = out_path(out);
  ensure_parent_dir(target);
  save_manifest(target, manifest);
  json summary = {{"pairs", manifest.pairs.size()},
                  {"prompts", manifest.prompts.size()},
                  {"out", target}};
  if (manifest.short_of_top_k) summary["short_of_top_k"] = true;
  std::cout << summary.dump() << '\n';
  return 0;
}

// search-run config: {"search": {...}, "weights": {...}, "target_path": str,
// "table_path": str?, "schedule_kind": str?, "mode_index": n?,
// "reward": "analytic" | {"command": [...], "timeout_s": f}}.
int cmd_search_run(const std::string& config_path,
                   const std::string& prompt_path, const std::string& out,
                   bool seed_set, std::uint64_t seed, std::size_t workers) {
  const json j = read_json_file(config_path);
  const std::string base = fs::path(config_path).parent_path().string();

  SearchConfig scfg =
      search_config_from_json(require_field(j, "search", "search-run config"));
  if (seed_set) scfg.seed = seed;
  RewardConfig weights;
  if (j.contains("weights"))
    weights = reward_config_from_json(j.at("weights"));
  const std::string target_path = resolve_in(
      base,
      require_field(j, "target_path", "search-run config").get<std::string>());
  std::string table_path;
  if (j.contains("table_path"))
    table_path = resolve_in(base, j.at("table_path").get<std::string>());
  ScheduleKind kind = ScheduleKind::LinearAlphaBar;
  if (j.contains("schedule_kind"))
    kind = schedule_kind_from_string(j.at("schedule_kind").get<std::string>());
  const std::size_t mode_index =
      j.contains("mode_index") ? j.at("mode_index").get<std::size_t>() : 0;

  ExternalRewardSpec external;
  if (j.contains("reward") && !j.at("reward").is_string()) {
    const json& r = j.at("reward");
    external.command =
        require_field(r, "command", "reward spec").get<std::vector<std::string>>();
    if (r.contains("timeout_s"))
      external.timeout_s = r.at("timeout_s").get<double>();
  } else if (j.contains("reward") &&
             j.at("reward").get<std::string>() != "analytic") {
    throw Error(ErrorKind::InvalidConfig,
                "reward must be \"analytic\" or an external-command object");
  }

  const GaussianMixtureTarget target = load_target(target_path);
  if (external.command.empty() && mode_index >= target.components.size())
    throw Error(ErrorKind::InvalidConfig,
                "mode_index " + std::to_string(mode_index) +
                    " out of range for target with " +
                    std::to_string(target.components.size()) + " modes");

  PromptSpec prompt = load_prompt(prompt_path);
  EmbeddingTable table;
  if (!table_path.empty()) table = load_embedding_table(table_path);
  const double d_sem = prompt.d_sem.has_value()
                           ? *prompt.d_sem
                           : semantic_distance_or_zero(prompt, table).value;

  const NoiseSchedule sched = make_schedule(scfg.T, kind);
  GmDenoiser model(target, &sched);
  std::unique_ptr<RewardModel> reward;
  if (external.command.empty())
    reward = std::make_unique<AnalyticReward>(target, mode_index);
  else
    reward = std::make_unique<ExternalRewardModel>(external);

  SearchContext ctx;
  ctx.model = &model;
  ctx.schedule = &sched;
  ctx.reward = reward.get();
  ctx.reward_config = weights;
  ctx.prompt = prompt;
  ctx.d_sem = d_sem;
  ctx.workers = workers;

  const RunRecord rec = run_search(scfg, ctx);
  const std::string target_file = out_path(out);
  ensure_parent_dir(target_file);
  save_run_record(target_file, rec);
  const json summary = {{"reward", rec.winner.reward},
                        {"nfe_total", rec.nfe_total},
                        {"winner_id", rec.winner.id},
                        {"d_sem", rec.d_sem},
                        {"out", target_file}};
  std::cout << summary.dump() << '\n';
  return 0;
}

int cmd_sweep_run(const std::string& config_path, const std::string& out_dir,
                  bool seed_set, std::uint64_t seed, std::size_t workers) {
  SweepConfig cfg = load_sweep_config(config_path);
  if (seed_set) cfg.seeds = {seed};
  const std::string dir = out_path(out_dir);
  const std::vector<SweepRow> rows = run_sweep(cfg, dir, workers);
  std::size_t failed = 0;
  for (const SweepRow& r : rows) failed += r.failed ? 1 : 0;
  const json summary = {{"rows", rows.size()},
                        {"failed", failed},
                        {"out", (fs::path(dir) / "rows.csv").string()}};
  std::cout << summary.dump() << '\n';
  return 0;
}

int cmd_report(const std::string& rows_path, const std::string& out_dir) {
  const std::vector<SweepRow> rows = load_rows_csv(rows_path);
  const Report rep = build_report(rows);
  const std::string dir = out_path(out_dir);
  write_report(rep, dir);
  const json summary = {{"cells", rep.cells.size()},
                        {"out", (fs::path(dir) / "report.md").string()}};
  std::cout << summary.dump() << '\n';
  return 0;
}

int cmd_semantics_score(const std::string& prompt_path,
                        const std::string& table_path) {
  PromptSpec prompt = load_prompt(prompt_path);
  EmbeddingTable table;
  if (!table_path.empty()) table = load_embedding_table(table_path);
  const SemanticDistance sd = semantic_distance(prompt, table);
  const json summary = {{"d_sem", sd.value},
                        {"pair_count", sd.pair_count},
                        {"any_fallback", sd.any_fallback}};
  std::cout << summary.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imagery — reward-guided test-time search for diffusion samplers"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "Override the configured run seed");
  std::size_t workers = 1;
  app.add_option("--workers", workers, "Worker threads (default 1)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "error|warn|info|debug")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));

  // bench build
  CLI::App* bench = app.add_subcommand("bench", "Prompt-suite construction");
  bench->require_subcommand(1);
  bench->fallthrough();
  std::string catalog_path, bench_table, bench_kind = "object-action";
  std::string bench_template = "default-v1", bench_out;
  std::size_t top_k = 0;
  CLI::App* bench_build =
      bench->add_subcommand("build", "Select distant pairs, render prompts");
  bench_build->fallthrough();
  bench_build->add_option("--catalog", catalog_path, "Concept catalog JSON")
      ->required();
  bench_build->add_option("--table", bench_table, "Embedding table JSONL");
  bench_build->add_option("--kind", bench_kind,
                          "object-action|action-action");
  bench_build->add_option("--template", bench_template, "Prompt template id");
  bench_build->add_option("--top-k", top_k, "Most distant pairs to keep")
      ->required()
      ->check(CLI::PositiveNumber);
  bench_build->add_option("--out", bench_out, "Manifest output path")
      ->required();

  // search run
  CLI::App* search = app.add_subcommand("search", "Single search runs");
  search->require_subcommand(1);
  search->fallthrough();
  std::string search_config, search_prompt, search_out;
  CLI::App* search_run =
      search->add_subcommand("run", "Run one strategy on one prompt");
  search_run->fallthrough();
  search_run->add_option("--config", search_config, "Search-run config JSON")
      ->required();
  search_run->add_option("--prompt", search_prompt, "Prompt JSON")->required();
  search_run->add_option("--out", search_out, "Run-record output path")
      ->required();

  // sweep run
  CLI::App* sweep = app.add_subcommand("sweep", "Grid sweeps");
  sweep->require_subcommand(1);
  sweep->fallthrough();
  std::string sweep_config, sweep_out_dir;
  CLI::App* sweep_run = sweep->add_subcommand("run", "Run a sweep grid");
  sweep_run->fallthrough();
  sweep_run->add_option("--config", sweep_config, "Sweep config JSON")
      ->required();
  sweep_run->add_option("--out-dir", sweep_out_dir, "Output directory")
      ->required();

  // report
  std::string report_rows, report_out;
  CLI::App* report = app.add_subcommand("report", "Aggregate a sweep CSV");
  report->fallthrough();
  report->add_option("--rows", report_rows, "rows.csv from a sweep")
      ->required();
  report->add_option("--out", report_out, "Report output directory")
      ->required();

  // semantics score
  CLI::App* semantics = app.add_subcommand("semantics", "Semantic distance");
  semantics->require_subcommand(1);
  semantics->fallthrough();
  std::string sem_prompt, sem_table;
  CLI::App* sem_score =
      semantics->add_subcommand("score", "Print Eq. 2 distance for a prompt");
  sem_score->fallthrough();
  sem_score->add_option("--prompt", sem_prompt, "Prompt JSON")->required();
  sem_score->add_option("--table", sem_table, "Embedding table JSONL");

  CLI11_PARSE(app, argc, argv);
  set_log_level(log_level_from_string(log_level));
  log_debug("kernel backend: " + kern::backend_name());
  const bool seed_set = seed_opt->count() > 0;

  try {
    if (bench_build->parsed())
      return cmd_bench_build(catalog_path, bench_table, bench_kind,
                             bench_template, top_k, bench_out);
    if (search_run->parsed())
      return cmd_search_run(search_config, search_prompt, search_out,
                            seed_set, seed, workers);
    if (sweep_run->parsed())
      return cmd_sweep_run(sweep_config, sweep_out_dir, seed_set, seed,
                           workers);
    if (report->parsed()) return cmd_report(report_rows, report_out);
    if (sem_score->parsed()) return cmd_semantics_score(sem_prompt, sem_table);
  } catch (const Error& e) {
    log_error(std::string(to_string(e.kind())) + ": " + e.what());
    return 1;
  } catch (const std::exception& e) {
    log_error(e.what());
    return 1;
  }
  return 0;
}
