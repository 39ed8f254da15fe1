#include "kaping/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace kaping::log {

namespace {
std::atomic<bool> g_enabled{true};
std::mutex g_mutex;
}  // namespace

void set_enabled(bool enabled) { g_enabled.store(enabled); }

bool enabled() { return g_enabled.load(); }

void warn(std::string_view message) {
  if (!g_enabled.load()) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << "kaping: warning: " << message << '\n';
}

}  // namespace kaping::log
