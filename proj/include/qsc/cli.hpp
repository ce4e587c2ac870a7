// cli.hpp: the qsc command-line front end

#pragma once

#include <iosfwd>

namespace qsc {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    exit_ok = 0,
    exit_rejected = 1,
    exit_parse = 2,
    exit_residual = 3,
    exit_non_contraction = 4,
};

/// Runs `qsc <subcommand> ...`; reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

} // namespace qsc
