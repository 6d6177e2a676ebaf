#pragma once

#include <iosfwd>

namespace verisparse {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 2,
  kExitInputError = 3,
  kExitInternalError = 4,
};

// Entry point of the verisparse command line tool:
//   verisparse verify|solve|bench|info [options]
// Summaries go to out, diagnostics to err. Returns an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace verisparse
