#include "getf/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <string>

namespace getf {

namespace {

LogLevel level_from_env() {
    const char* v = std::getenv("GETF_LOG");
    if (v == nullptr) return LogLevel::Info;
    const std::string s(v);
    if (s == "quiet") return LogLevel::Quiet;
    if (s == "debug") return LogLevel::Debug;
    return LogLevel::Info;
}

std::atomic<int>& current() {
    static std::atomic<int> level{static_cast<int>(level_from_env())};
    return level;
}

} // namespace

LogLevel log_level() { return static_cast<LogLevel>(current().load()); }

void set_log_level(LogLevel level) { current().store(static_cast<int>(level)); }

void log_info(std::string_view msg) {
    if (log_level() >= LogLevel::Info) std::cerr << "[getf] " << msg << '\n';
}

void log_debug(std::string_view msg) {
    if (log_level() >= LogLevel::Debug) std::cerr << "[getf:debug] " << msg << '\n';
}

} // namespace getf
