#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ccare/iteration.h"

namespace ccare::cli {

/// Process exit codes. Every execution path maps to exactly one of these.
enum ExitCode : int {
  kOk = 0,
  kValidationFailed = 1,
  kBadInput = 2,      // malformed file, bad flag, unknown example
  kPrecondition = 3,  // PBH test failed for the resolved shifts
  kSolverFailure = 4, // inner CARE failure or I/O error while writing output
  kNotConverged = 5,
};

/// Parses `auto`, `auto:<margin>`, a single value (uniform over modes) or a
/// comma-separated per-mode list.
ShiftSpec parse_rho_spec(const std::string& text, int modes);

/// Parses `zero`, `identity:<c>` or `file:<path>`.
InitSpec parse_init_spec(const std::string& text);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace ccare::cli
