#pragma once

#include <cstdarg>
#include <cstdio>
#include <string>

namespace topiclite {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

inline LogLevel& log_level() {
  static LogLevel level = LogLevel::warn;
  return level;
}

inline bool set_log_level(const std::string& name) {
  if (name == "error") log_level() = LogLevel::error;
  else if (name == "warn") log_level() = LogLevel::warn;
  else if (name == "info") log_level() = LogLevel::info;
  else if (name == "debug") log_level() = LogLevel::debug;
  else return false;
  return true;
}

namespace detail {
inline void vlog(LogLevel level, const char* tag, const char* fmt, va_list ap) {
  if (level > log_level()) return;
  std::fprintf(stderr, "[%s] ", tag);
  std::vfprintf(stderr, fmt, ap);
  std::fprintf(stderr, "\n");
}
}  // namespace detail

inline void log_error(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  detail::vlog(LogLevel::error, "error", fmt, ap);
  va_end(ap);
}

inline void log_warn(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  detail::vlog(LogLevel::warn, "warn", fmt, ap);
  va_end(ap);
}

inline void log_info(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  detail::vlog(LogLevel::info, "info", fmt, ap);
  va_end(ap);
}

inline void log_debug(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  detail::vlog(LogLevel::debug, "debug", fmt, ap);
  va_end(ap);
}

}  // namespace topiclite
