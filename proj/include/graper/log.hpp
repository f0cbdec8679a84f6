#pragma once

#include <functional>
#include <string>

namespace graper {

using WarningHandler = std::function<void(const std::string&)>;

// Routes library warnings; the default writes "warning: ..." to stderr.
// Passing an empty handler silences them. Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace graper
