#pragma once

#include "efie/config.hpp"

#include <iosfwd>

namespace efie {

enum ExitCode { exit_ok = 0, exit_numerical = 1, exit_input = 2 };

/// Initial mesh of a run: canonical shape or mesh file, refined uniformly
/// `initial_refinements` times.
MeshPtr initial_mesh(const RunConfig& cfg);

/// Runs one validated configuration and writes its outputs under cfg.out.
/// Throws on failure.
void run(const RunConfig& cfg, std::ostream& log);

/// Full command line: parses flags, runs, and turns exceptions into exit codes
/// and an error JSON on `err` and in <out>/error.json.
int main_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace efie
