#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace riskprop {

// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,             // success, propagation converged
  kExitFailure = 1,        // usage, validation or I/O error
  kExitNotConverged = 2,   // stopped at the iteration cap
};

// Entry point behind the `riskprop` executable. args excludes the program
// name. Human-readable output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace riskprop
