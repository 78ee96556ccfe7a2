#pragma once

#include <fmt/format.h>

#include <cstdio>
#include <mutex>
#include <string_view>

namespace skillforge::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

Level threshold();
void set_threshold(Level level);
void emit(Level level, std::string_view message);

template <class... Args>
void debug(fmt::format_string<Args...> f, Args&&... args) {
  if (threshold() <= Level::debug)
    emit(Level::debug, fmt::format(f, std::forward<Args>(args)...));
}
template <class... Args>
void info(fmt::format_string<Args...> f, Args&&... args) {
  if (threshold() <= Level::info)
    emit(Level::info, fmt::format(f, std::forward<Args>(args)...));
}
template <class... Args>
void warn(fmt::format_string<Args...> f, Args&&... args) {
  if (threshold() <= Level::warn)
    emit(Level::warn, fmt::format(f, std::forward<Args>(args)...));
}
template <class... Args>
void error(fmt::format_string<Args...> f, Args&&... args) {
  if (threshold() <= Level::error)
    emit(Level::error, fmt::format(f, std::forward<Args>(args)...));
}

}  // namespace skillforge::log
