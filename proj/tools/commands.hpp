#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qbc::cli {

enum ExitCode : int {
  kOk = 0,
  kParseFailure = 2,
  kInvariantFailure = 3,
  kIoFailure = 4,
  kSolverFailure = 5,
};

/// Runs the command line `args` (without the program name). Normal output goes
/// to `out`, diagnostics to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qbc::cli
