#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace proto_tqtl::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kSemanticError = 2,
  kViolations = 3, // only with --strict
};

/// Runs the command line `args` (program name first) and returns the exit
/// code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace proto_tqtl::cli
