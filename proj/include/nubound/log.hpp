#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace nubound {

enum class LogLevel { error = 0, info = 1, debug = 2 };

/// Verbosity from NUM_LOG={error,info,debug}; read once, defaults to error.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("NUM_LOG");
    if (env == nullptr) return LogLevel::error;
    const std::string_view v(env);
    if (v == "debug") return LogLevel::debug;
    if (v == "info") return LogLevel::info;
    return LogLevel::error;
  }();
  return level;
}

inline void log(LogLevel level, std::string_view msg) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  static constexpr const char* tags[] = {"error", "info", "debug"};
  std::cerr << "[nubound " << tags[static_cast<int>(level)] << "] " << msg << '\n';
}

} // namespace nubound
