#pragma once

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "imagery/error.hpp"

namespace imagery {

// nlohmann::json keeps object keys sorted, which gives canonical dumps;
// doubles serialize with shortest round-trip digits. Both matter for the
// byte-identical determinism contract.
using json = nlohmann::json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::Parse, "invalid JSON: " + path);
  return j;
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write: " + path);
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path);
}

inline const json& require_field(const json& j, const char* key,
                                 const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw Error(ErrorKind::Parse, ctx + ": missing field '" + key + "'");
  return *it;
}

}  // namespace imagery
