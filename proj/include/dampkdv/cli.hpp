#pragma once

// Command-line front end.
//
//   dampkdv <subcommand> [--config PATH] [--out DIR] [--set key=value]... [--seed N] [--quiet]
//
// Subcommands: simulate, verify-identities, estimate-constants, smoothing, envelope, attractor,
// kdv-limit, plot DIR. Without --out, results go to $DAMPKDV_OUT/<subcommand> (default
// ./dampkdv_out/<subcommand>). Every run writes report.json, timing.json and plot.gp.

#include <filesystem>
#include <iosfwd>
#include <string>

namespace dampkdv {

enum ExitCode : int {
  kExitPass = 0,
  kExitAssertion = 1,
  kExitConfig = 2,
  kExitSolver = 3,
};

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Output directory for a run: explicit, else $DAMPKDV_OUT/<experiment>, else ./dampkdv_out/<experiment>.
std::filesystem::path resolve_output_dir(const std::filesystem::path& explicit_dir, const std::string& experiment);

}  // namespace dampkdv
