#pragma once

// Command-line front end: dim, phi, simulate, boxcount, diagnose, render.

#include <iosfwd>
#include <string>
#include <vector>

namespace boxlike {

/// Stable exit-code contract of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,  ///< diagnose: a check failed; or an unexpected error
  kExitConfig = 2,       ///< invalid configuration or validation rejection
  kExitSolver = 3,
  kExitResource = 4,
  kExitFit = 5,
  kExitInsufficientDepth = 6,
};

/// `args` excludes the program name. Reports go to `out` unless --out is
/// given; diagnostics and drawn seeds go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace boxlike
