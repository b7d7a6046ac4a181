#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imagery/rewards.hpp"

namespace imagery {

struct SweepRow {
  std::string strategy;  // config label, restricted to [A-Za-z0-9_-]
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  std::size_t prompt_index = 0;
  double d_sem = 0.0;
  double reward = 0.0;
  RewardComponents components;
  std::uint64_t nfe_actual = 0;
  double wall_time = 0.0;
  bool failed = false;
};

// Shortest round-trip decimal form (std::to_chars); parsing an emitted CSV
// and re-emitting it reproduces identical bytes.
std::string format_double(double v);
double parse_double(const std::string& s);

extern const char* const kSweepCsvHeader;

std::string sweep_row_to_csv(const SweepRow& row);
SweepRow sweep_row_from_csv(const std::string& line);

std::string rows_to_csv(const std::vector<SweepRow>& rows);  // header + rows
std::vector<SweepRow> rows_from_csv(const std::string& text);
std::vector<SweepRow> load_rows_csv(const std::string& path);
void write_rows_csv(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace imagery
