#pragma once

#include <string>

#include "cq/config.hpp"
#include "cq/harness.hpp"
#include "cq/patch_io.hpp"
#include "cq/solver.hpp"

namespace cq {

/// A solve job assembled from a config file: the problem, solver settings and
/// the sidecar metadata of its source surface.
struct SolveJob {
  std::string name;
  ProblemSpec spec;
  SolverConfig solver;
  PatchMeta meta;
};

/// Builds a ProblemSpec from one [problem] section. `kind` selects between a
/// manufactured right-hand side (discrete F of the surface) and an analytic
/// problem with constant rhs and the surface as boundary data.
SolveJob problem_from_section(const ConfigSection& section);

SolverConfig solver_from_section(const ConfigSection* section);

/// Expects one [problem] section and an optional [solver] section.
SolveJob solve_job_from_config(const ConfigFile& config);

/// Expects repeated [problem] sections, an optional [solver] section, and an
/// optional [sweep] section with alpha / beta / c_candidate.
SweepConfig sweep_from_config(const ConfigFile& config);

}  // namespace cq
