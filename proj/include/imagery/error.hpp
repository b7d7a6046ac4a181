#pragma once

#include <stdexcept>
#include <string>

namespace imagery {

enum class ErrorKind {
  InvalidInput,
  InvalidConfig,
  NotComputable,
  DegenerateRank,
  DivisionByZero,
  ExternalReward,
  SearchFailed,
  ReportEmpty,
  Io,
  Parse,
};

const char* to_string(ErrorKind kind);

/// Library-wide exception. `payload` carries extra context for kinds that
/// need it (captured subprocess output, partial run record JSON); `rank`
/// is set for DegenerateRank.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}
  Error(ErrorKind kind, std::string message, std::string payload)
      : std::runtime_error(std::move(message)),
        kind_(kind),
        payload_(std::move(payload)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& payload() const { return payload_; }

  int rank = -1;

 private:
  ErrorKind kind_;
  std::string payload_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::NotComputable: return "not-computable";
    case ErrorKind::DegenerateRank: return "degenerate-rank";
    case ErrorKind::DivisionByZero: return "division-by-zero";
    case ErrorKind::ExternalReward: return "external-reward";
    case ErrorKind::SearchFailed: return "search-failed";
    case ErrorKind::ReportEmpty: return "report-empty";
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

}  // namespace imagery
