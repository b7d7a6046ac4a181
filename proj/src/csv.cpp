#include "imagery/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "imagery/error.hpp"

namespace imagery {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw Error(ErrorKind::Parse, "bad number in CSV: '" + s + "'");
  return v;
}

const char* const kSweepCsvHeader =
    "strategy,budget,seed,prompt,d_sem,reward,mq,ta,vq,r_any,nfe_actual,"
    "wall_time,failed";

std::string sweep_row_to_csv(const SweepRow& r) {
  std::string out;
  out += r.strategy;
  out += ',';
  out += std::to_string(r.budget);
  out += ',';
  out += std::to_string(r.seed);
  out += ',';
  out += std::to_string(r.prompt_index);
  out += ',';
  out += format_double(r.d_sem);
  out += ',';
  out += format_double(r.reward);
  out += ',';
  out += format_double(r.components.mq);
  out += ',';
  out += format_double(r.components.ta);
  out += ',';
  out += format_double(r.components.vq);
  out += ',';
  out += format_double(r.components.r_any);
  out += ',';
  out += std::to_string(r.nfe_actual);
  out += ',';
  out += format_double(r.wall_time);
  out += ',';
  out += r.failed ? '1' : '0';
  return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw Error(ErrorKind::Parse, "bad integer in CSV: '" + s + "'");
  return v;
}

}  // namespace

SweepRow sweep_row_from_csv(const std::string& line) {
  std::vector<std::string> f = split_fields(line);
  if (f.size() != 13)
    throw Error(ErrorKind::Parse, "CSV row needs 13 fields, got " +
                                      std::to_string(f.size()));
  SweepRow r;
  r.strategy = f[0];
  r.budget = parse_u64(f[1]);
  r.seed = parse_u64(f[2]);
  r.prompt_index = static_cast<std::size_t>(parse_u64(f[3]));
  r.d_sem = parse_double(f[4]);
  r.reward = parse_double(f[5]);
  r.components.mq = parse_double(f[6]);
  r.components.ta = parse_double(f[7]);
  r.components.vq = parse_double(f[8]);
  r.components.r_any = parse_double(f[9]);
  r.nfe_actual = parse_u64(f[10]);
  r.wall_time = parse_double(f[11]);
  if (f[12] != "0" && f[12] != "1")
    throw Error(ErrorKind::Parse, "CSV failed flag must be 0 or 1");
  r.failed = f[12] == "1";
  return r;
}

std::string rows_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  for (const SweepRow& r : rows) {
    out += sweep_row_to_csv(r);
    out += '\n';
  }
  return out;
}

std::vector<SweepRow> rows_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader)
    throw Error(ErrorKind::Parse, "unexpected CSV header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(sweep_row_from_csv(line));
  }
  return rows;
}

std::vector<SweepRow> load_rows_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open rows CSV: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return rows_from_csv(buf.str());
}

void write_rows_csv(const std::string& path,
                    const std::vector<SweepRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write rows CSV: " + path);
  out << rows_to_csv(rows);
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path);
}

}  // namespace imagery
