#include "refcalib/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <string_view>

namespace refcalib {
namespace {

LogLevel level_from_env() {
  const char* env = std::getenv("REFCALIB_LOG");
  if (env == nullptr) return LogLevel::kWarn;
  const std::string_view v(env);
  if (v == "quiet") return LogLevel::kQuiet;
  if (v == "info") return LogLevel::kInfo;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kWarn;
}

std::atomic<LogLevel>& level_storage() {
  static std::atomic<LogLevel> level{level_from_env()};
  return level;
}

const char* prefix(LogLevel level) {
  switch (level) {
    case LogLevel::kWarn: return "warning: ";
    case LogLevel::kInfo: return "info: ";
    case LogLevel::kDebug: return "debug: ";
    default: return "";
  }
}

}  // namespace

LogLevel log_level() { return level_storage().load(); }
void set_log_level(LogLevel level) { level_storage().store(level); }

void log(LogLevel level, const std::string& message) {
  if (level == LogLevel::kQuiet || level > log_level()) return;
  std::cerr << prefix(level) << message << '\n';
}

}  // namespace refcalib
