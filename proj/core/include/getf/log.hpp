#pragma once

#include <string_view>

namespace getf {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

/// Level from the GETF_LOG environment variable (quiet | info | debug), default info.
LogLevel log_level();
void set_log_level(LogLevel level);

void log_info(std::string_view msg);
void log_debug(std::string_view msg);

} // namespace getf
