#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qichan::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { ok = 0, verification_failed = 1, input_error = 2 };

/// Runs the tool on `args` (without the program name).  Input files named
/// "-" are read from `in`; reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace qichan::cli
