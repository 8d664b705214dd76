#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace expamoeba {

enum ExitCode : int {
  kExitOk = 0,
  kExitViolation = 1,
  kExitInput = 2,
  kExitInconclusive = 3,
};

/// Runs one subcommand; `args` excludes the program name. The key=value
/// report goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace expamoeba
