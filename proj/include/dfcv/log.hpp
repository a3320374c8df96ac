#pragma once

#include <string>

namespace dfcv {

enum class LogLevel { none = 0, info = 1, debug = 2 };

/// Verbosity from the DFCV_LOG environment variable ("info" or "debug"),
/// read once per process. Anything else (or unset) silences logging.
LogLevel log_level();

void log_info(const std::string& line);
void log_debug(const std::string& line);

}  // namespace dfcv
