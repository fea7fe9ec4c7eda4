#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bdmix::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kTheoremViolated = 2,
  kHorizonExceeded = 3,
};

/// Runs one subcommand. `args` excludes the program name. Primary output goes
/// to `out` unless redirected with --output; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bdmix::cli
