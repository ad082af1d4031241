#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mvw {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable holding the default worker count for `fit`.
inline constexpr const char* kWorkersEnv = "MVWISH_WORKERS";

/// Runs the command line `args` (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace mvw
