#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hmflow::cli {

/// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailed = 2,
  kConfigError = 3,
  kRuntimeAbort = 4,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hmflow::cli
