#pragma once

#include <iosfwd>

#include "mixedwave/config.hpp"

namespace mixedwave {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitSolver = 3,
};

/// One simulation on build_lshape(levels[0]). Writes solution.vtk,
/// energy.csv and the system matrices as requested.
int cmd_run(const RunConfig& config, std::ostream& log);

/// h- or tau-study of the configured case. Writes
/// <case>_<study>.csv and <case>_<study>.txt into the output directory.
int cmd_convergence(const RunConfig& config, std::ostream& log);

/// Counts, quality and invariant check of build_lshape(n); optional VTK.
int cmd_mesh_info(int n, const std::string& vtk_path, std::ostream& log);

}  // namespace mixedwave
