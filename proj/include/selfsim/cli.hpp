#pragma once

// Command line front end: run, verify and export subcommands.
//
// Exit codes: 0 all checks pass, 1 invalid configuration, 2 solver failure,
// 3 a check failed, 4 missing or corrupt stored data / I/O failure.

namespace selfsim {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2, kExitCheck = 3, kExitIntegrity = 4 };

int cli_main(int argc, char** argv);

}  // namespace selfsim
