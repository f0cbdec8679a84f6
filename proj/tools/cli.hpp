#pragma once

#include <string>
#include <vector>

namespace graper::cli {

// Exit codes: 0 success, 1 input or I/O error (including bad flags), 2 numerical failure.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args excludes the program name

}  // namespace graper::cli
