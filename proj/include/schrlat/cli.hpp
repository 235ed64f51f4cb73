#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace schrlat {

/// Exit codes of parse_and_dispatch.
enum ExitCode : int { exit_ok = 0, exit_runtime_error = 1, exit_validation = 2, exit_gate_failed = 3 };

/// Runs one command line (args excludes the program name). Reports are
/// written to `out` when the output path is "-", diagnostics to `err`.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int parse_and_dispatch(int argc, const char* const* argv);

}  // namespace schrlat
