#pragma once

#include <atomic>
#include <iostream>
#include <mutex>
#include <string>

#include "imagery/error.hpp"

namespace imagery {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

namespace detail {
inline std::atomic<int> g_log_level{static_cast<int>(LogLevel::Warn)};
inline std::mutex g_log_mutex;
}  // namespace detail

inline void set_log_level(LogLevel level) {
  detail::g_log_level.store(static_cast<int>(level));
}

inline LogLevel log_level() {
  return static_cast<LogLevel>(detail::g_log_level.load());
}

inline LogLevel log_level_from_string(const std::string& s) {
  if (s == "error") return LogLevel::Error;
  if (s == "warn") return LogLevel::Warn;
  if (s == "info") return LogLevel::Info;
  if (s == "debug") return LogLevel::Debug;
  throw Error(ErrorKind::InvalidConfig, "unknown log level: " + s);
}

// Logs go to stderr so stdout stays parseable (semantics score prints JSON).
inline void log_line(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) > detail::g_log_level.load()) return;
  static const char* tags[] = {"error", "warn", "info", "debug"};
  std::lock_guard<std::mutex> lock(detail::g_log_mutex);
  std::cerr << '[' << tags[static_cast<int>(level)] << "] " << msg << '\n';
}

inline void log_error(const std::string& m) { log_line(LogLevel::Error, m); }
inline void log_warn(const std::string& m) { log_line(LogLevel::Warn, m); }
inline void log_info(const std::string& m) { log_line(LogLevel::Info, m); }
inline void log_debug(const std::string& m) { log_line(LogLevel::Debug, m); }

}  // namespace imagery
