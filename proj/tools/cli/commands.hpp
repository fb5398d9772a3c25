#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace overlap::cli {

// Stable exit codes.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;    // bad flags, unreadable config or input
constexpr int kExitAborted = 3;  // computation aborted or could not finish

/// Parses `args` (without the program name) and runs the subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace overlap::cli
