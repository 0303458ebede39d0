#pragma once

#include <string>
#include <vector>

namespace salient {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // oracle mismatch or unexpected error
  kExitConfig = 2,
  kExitLoad = 3,
  kExitIo = 4,
};

/// Entry point of the `salient` tool; returns the process exit code.
int run_cli(int argc, const char* const* argv);

/// Convenience for tests: args exclude the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace salient
