#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imagery/csv.hpp"

namespace imagery {

// Aggregate of the non-failed rows sharing one (strategy, budget) cell.
struct ReportCell {
  std::string label;
  std::uint64_t budget = 0;
  std::size_t count = 0;   // rows aggregated
  std::size_t failed = 0;  // rows skipped
  double mean_reward = 0.0;
  double std_reward = 0.0;  // population standard deviation
  double mean_mq = 0.0;
  double mean_ta = 0.0;
  double mean_vq = 0.0;
  double mean_r_any = 0.0;
  double mean_nfe = 0.0;
};

struct StrategyVerdict {
  std::string label;
  // Mean reward non-decreasing across budgets (cells with data only;
  // vacuously true below two data points).
  bool monotone = false;
};

struct Report {
  std::vector<ReportCell> cells;          // sorted by (label, budget)
  std::vector<StrategyVerdict> verdicts;  // sorted by label
};

// Throws ReportEmpty when no row survives the failed filter.
Report build_report(const std::vector<SweepRow>& rows);

std::string report_markdown(const Report& r);

// "strategy,budget,mean_reward" rows for plotting, cells with data only.
std::string report_plot_csv(const Report& r);

// Writes report.md and plot.csv into out_dir (created if needed).
void write_report(const Report& r, const std::string& out_dir);

}  // namespace imagery
