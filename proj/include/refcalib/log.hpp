#pragma once

#include <string>

namespace refcalib {

enum class LogLevel { kQuiet = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Read once from REFCALIB_LOG (quiet|warn|info|debug); defaults to warn.
LogLevel log_level();
void set_log_level(LogLevel level);

// Lowers the level to `level` for its lifetime unless the current level is
// already at or below it.
class ScopedLogLevel {
 public:
  explicit ScopedLogLevel(LogLevel level) : saved_(log_level()) {
    if (level < saved_) set_log_level(level);
  }
  ~ScopedLogLevel() { set_log_level(saved_); }
  ScopedLogLevel(const ScopedLogLevel&) = delete;
  ScopedLogLevel& operator=(const ScopedLogLevel&) = delete;

 private:
  LogLevel saved_;
};

// Diagnostics go to standard error.
void log(LogLevel level, const std::string& message);
inline void log_warn(const std::string& m) { log(LogLevel::kWarn, m); }
inline void log_info(const std::string& m) { log(LogLevel::kInfo, m); }

}  // namespace refcalib
