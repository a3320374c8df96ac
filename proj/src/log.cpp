#include "dfcv/log.hpp"

#include <cstdlib>
#include <cstring>
#include <iostream>

namespace dfcv {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("DFCV_LOG");
    if (env == nullptr) return LogLevel::none;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::info;
    return LogLevel::none;
  }();
  return level;
}

void log_info(const std::string& line) {
  if (log_level() >= LogLevel::info) {
    std::cerr << "[dfcv] " << line << '\n';
  }
}

void log_debug(const std::string& line) {
  if (log_level() >= LogLevel::debug) {
    std::cerr << "[dfcv:debug] " << line << '\n';
  }
}

}  // namespace dfcv
