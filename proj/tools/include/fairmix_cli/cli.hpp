#pragma once

#include <ostream>
#include <span>
#include <string>

namespace fairmix::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kExperimentFailure = 2 };

/// Runs one subcommand. `args` excludes the program name. The CSV goes to
/// --out, then the scenario's outputs.csv, then `out`; the one-line summary goes
/// to `out`, or to `err` when the CSV already occupies `out`.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Invariant checks behind `fairmix selftest`; prints one line per check.
bool run_selftest(std::ostream& out);

}  // namespace fairmix::cli
