#pragma once

// Command-line front end: `test`, `simulate`, `power`.
// Exit codes: 0 evaluated, 2 validation error, 3 I/O error.

#include <iosfwd>
#include <string>
#include <vector>

namespace covel {

enum ExitCode : int { exit_ok = 0, exit_internal = 1, exit_validation = 2, exit_io = 3 };

/// Runs the CLI on argv-style arguments (args[0] is the program name).
/// Reports go to `out`, one-line diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace covel
