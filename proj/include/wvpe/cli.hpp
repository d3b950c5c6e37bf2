#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wvpe::cli {

inline constexpr const char* tool_name = "wvpe";
inline constexpr const char* tool_version = "0.1.0";

// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_physics = 3;
inline constexpr int exit_calibration = 4;
inline constexpr int exit_estimation_range = 5;

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color = false);

}  // namespace wvpe::cli
