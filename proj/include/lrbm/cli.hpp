#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lrbm {

// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;     // bad flags or hyperparameters
inline constexpr int kExitData = 2;      // unreadable, malformed or inconsistent input
inline constexpr int kExitInternal = 3;  // violated internal invariant

// Entry point of the lrbm-boost tool: subcommands train, predict, explain and
// eval. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lrbm
