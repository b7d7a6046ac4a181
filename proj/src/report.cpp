#include "imagery/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "imagery/error.hpp"

namespace imagery {

namespace {

struct Acc {
  std::vector<double> rewards;
  double mq = 0.0, ta = 0.0, vq = 0.0, r_any = 0.0, nfe = 0.0;
  std::size_t failed = 0;
};

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

Report build_report(const std::vector<SweepRow>& rows) {
  std::map<std::pair<std::string, std::uint64_t>, Acc> groups;
  std::size_t alive = 0;
  for (const SweepRow& r : rows) {
    Acc& a = groups[{r.strategy, r.budget}];
    if (r.failed) {
      ++a.failed;
      continue;
    }
    ++alive;
    a.rewards.push_back(r.reward);
    a.mq += r.components.mq;
    a.ta += r.components.ta;
    a.vq += r.components.vq;
    a.r_any += r.components.r_any;
    a.nfe += static_cast<double>(r.nfe_actual);
  }
  if (alive == 0)
    throw Error(ErrorKind::ReportEmpty,
                "no non-failed rows to aggregate (" +
                    std::to_string(rows.size()) + " rows total)");

  Report rep;
  for (const auto& [key, a] : groups) {
    ReportCell cell;
    cell.label = key.first;
    cell.budget = key.second;
    cell.count = a.rewards.size();
    cell.failed = a.failed;
    if (cell.count > 0) {
      const double n = static_cast<double>(cell.count);
      double sum = 0.0;
      for (double v : a.rewards) sum += v;
      cell.mean_reward = sum / n;
      double ss = 0.0;
      for (double v : a.rewards) {
        const double d = v - cell.mean_reward;
        ss += d * d;
      }
      cell.std_reward = std::sqrt(ss / n);
      cell.mean_mq = a.mq / n;
      cell.mean_ta = a.ta / n;
      cell.mean_vq = a.vq / n;
      cell.mean_r_any = a.r_any / n;
      cell.mean_nfe = a.nfe / n;
    }
    rep.cells.push_back(std::move(cell));
  }
  // std::map ordering already gives (label, budget) ascending.

  std::map<std::string, std::vector<const ReportCell*>> by_label;
  for (const ReportCell& c : rep.cells)
    if (c.count > 0) by_label[c.label].push_back(&c);
  for (const auto& [label, cells] : by_label) {
    bool mono = true;
    for (std::size_t i = 1; i < cells.size(); ++i)
      if (cells[i]->mean_reward < cells[i - 1]->mean_reward - 1e-12)
        mono = false;
    rep.verdicts.push_back({label, mono});
  }
  return rep;
}

std::string report_markdown(const Report& r) {
  std::string out = "# Sweep report\n\n";
  out +=
      "| strategy | budget | runs | failed | mean reward | std reward "
      "| mean mq | mean ta | mean vq | mean r_any | mean NFE |\n";
  out += "|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const ReportCell& c : r.cells) {
    out += "| " + c.label + " | " + std::to_string(c.budget) + " | " +
           std::to_string(c.count) + " | " + std::to_string(c.failed) + " | ";
    if (c.count > 0) {
      out += fmt6(c.mean_reward) + " | " + fmt6(c.std_reward) + " | " +
             fmt6(c.mean_mq) + " | " + fmt6(c.mean_ta) + " | " +
             fmt6(c.mean_vq) + " | " + fmt6(c.mean_r_any) + " | " +
             fmt6(c.mean_nfe) + " |\n";
    } else {
      out += "- | - | - | - | - | - | - |\n";
    }
  }
  out += "\n## Budget scaling\n\n";
  for (const StrategyVerdict& v : r.verdicts)
    out += "- " + v.label + ": mean reward non-decreasing across budgets: " +
           (v.monotone ? "yes" : "no") + "\n";
  return out;
}

std::string report_plot_csv(const Report& r) {
  std::string out = "strategy,budget,mean_reward\n";
  for (const ReportCell& c : r.cells) {
    if (c.count == 0) continue;
    out += c.label + "," + std::to_string(c.budget) + "," +
           format_double(c.mean_reward) + "\n";
  }
  return out;
}

void write_report(const Report& r, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw Error(ErrorKind::Io,
                "cannot create " + out_dir + ": " + ec.message());
  auto write_file = [&](const char* name, const std::string& body) {
    const fs::path p = fs::path(out_dir) / name;
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
    out << body;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed: " + p.string());
  };
  write_file("report.md", report_markdown(r));
  write_file("plot.csv", report_plot_csv(r));
}

}  // namespace imagery
