#pragma once

#include <functional>
#include <string>

namespace oamsim::diag {

using WarningHandler = std::function<void(const std::string&)>;

// Replace the warning sink (default: stderr). Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler h);
void warn(const std::string& msg);

}  // namespace oamsim::diag
