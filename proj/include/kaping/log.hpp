#pragma once

#include <string_view>

namespace kaping::log {

// Warnings go to stderr unless silenced (tests and --quiet).
void set_enabled(bool enabled);
bool enabled();
void warn(std::string_view message);

}  // namespace kaping::log
