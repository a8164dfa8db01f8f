#pragma once

#include <functional>
#include <string>

namespace mmfso {

// Non-fatal diagnostics (clamped probabilities, snapped parameters, ...).
// Default sink writes "warning: ..." to stderr; thread-safe.
void warn(const std::string& message);
void set_warning_sink(std::function<void(const std::string&)> sink);

}  // namespace mmfso
