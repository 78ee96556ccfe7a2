#include "skillforge/util/log.hpp"

#include <atomic>

namespace skillforge::log {

namespace {
std::atomic<Level> g_threshold{Level::warn};
std::mutex g_mu;

const char* tag(Level level) {
  switch (level) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
    default: return "?";
  }
}
}  // namespace

Level threshold() { return g_threshold.load(std::memory_order_relaxed); }

void set_threshold(Level level) {
  g_threshold.store(level, std::memory_order_relaxed);
}

void emit(Level level, std::string_view message) {
  std::lock_guard lk(g_mu);
  std::fprintf(stderr, "[%s] %.*s\n", tag(level),
               static_cast<int>(message.size()), message.data());
}

}  // namespace skillforge::log
