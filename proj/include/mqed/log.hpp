#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

// Minimal stderr logger; level from the MQED_LOG environment variable
// (error, warn, info, debug). Defaults to warn.

namespace mqed::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

inline Level threshold() {
  static Level lvl = [] {
    const char* e = std::getenv("MQED_LOG");
    if (!e) return Level::Warn;
    if (std::strcmp(e, "error") == 0) return Level::Error;
    if (std::strcmp(e, "info") == 0) return Level::Info;
    if (std::strcmp(e, "debug") == 0) return Level::Debug;
    return Level::Warn;
  }();
  return lvl;
}

template <typename... Args>
void emit(Level lvl, const char* tag, const char* fmt, Args... args) {
  if (lvl > threshold()) return;
  std::fprintf(stderr, "[mqed %s] ", tag);
  std::fprintf(stderr, fmt, args...);
  std::fprintf(stderr, "\n");
}

template <typename... Args>
void error(const char* fmt, Args... args) {
  emit(Level::Error, "error", fmt, args...);
}
template <typename... Args>
void warn(const char* fmt, Args... args) {
  emit(Level::Warn, "warn", fmt, args...);
}
template <typename... Args>
void info(const char* fmt, Args... args) {
  emit(Level::Info, "info", fmt, args...);
}
template <typename... Args>
void debug(const char* fmt, Args... args) {
  emit(Level::Debug, "debug", fmt, args...);
}

}  // namespace mqed::log
