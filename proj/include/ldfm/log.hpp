#pragma once

#include <ostream>
#include <string_view>

namespace ldfm {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

/// Reads LDFM_LOG (error|info|debug); anything else means info.
LogLevel log_level_from_env();

/// Minimal leveled logger writing to one stream.
class Logger {
 public:
  Logger(std::ostream& sink, LogLevel level) : sink_(sink), level_(level) {}

  bool enabled(LogLevel level) const { return level <= level_; }
  void error(std::string_view msg) const { write(LogLevel::kError, msg); }
  void info(std::string_view msg) const { write(LogLevel::kInfo, msg); }
  void debug(std::string_view msg) const { write(LogLevel::kDebug, msg); }

 private:
  void write(LogLevel level, std::string_view msg) const {
    if (enabled(level)) sink_ << msg << '\n';
  }

  std::ostream& sink_;
  LogLevel level_;
};

}  // namespace ldfm
