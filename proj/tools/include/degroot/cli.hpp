#pragma once

#include <string>
#include <vector>

namespace degroot::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNoConvergence = 3;

/// Runs one subcommand. args[0] is the program name.
int run(const std::vector<std::string>& args);

}  // namespace degroot::cli
