#pragma once

#include <string>
#include <vector>

namespace splitsim {

// Exit codes used by the command-line tool.
enum ExitCode {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitProfile = 4,
  kExitSim = 5,
};

// Runs the command-line tool. Exposed from the library so tests can drive
// subcommands in-process.
int cli_main(const std::vector<std::string>& args);
int cli_main(int argc, char** argv);

}  // namespace splitsim
