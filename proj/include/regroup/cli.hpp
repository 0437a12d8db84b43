#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace regroup::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitPass = 0;
inline constexpr int kExitInputError = 1;    // bad flags, parse or certification failure
inline constexpr int kExitVerifyFailed = 2;  // a check ran and failed

// Runs one command line (args excludes the program name). Reports go to `out`
// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace regroup::cli
