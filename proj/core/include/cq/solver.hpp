#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cq/geometry.hpp"
#include "cq/grid.hpp"
#include "cq/quotient.hpp"
#include "cq/surfaces.hpp"

namespace cq {

using Evaluator = std::function<double(std::span<const double>)>;

/// Discrete Dirichlet instance of F(lambda(x)) = f(x) on a graph patch.
/// `rhs` must be strictly positive on the grid; `boundary` supplies the
/// Dirichlet data on non-interior nodes; `initial_guess`, when set, replaces
/// the automatic convex-quadratic start.
struct ProblemSpec {
  QuotientOperator op;
  GridLayout grid;
  Evaluator rhs;
  Evaluator boundary;
  Evaluator initial_guess;
};

struct SolverConfig {
  double tol_residual = 1e-9;             // absolute max-norm over interior nodes
  int max_iters = 50;
  double backtrack = 0.5;
  double min_step = 9.5367431640625e-07;  // 2^-20
  double lin_tol = 1e-10;                 // relative tolerance of the linear solve
};

struct TraceRow {
  int iter = 0;
  double residual_max = 0.0;
  double step_length = 0.0;
  bool admissible = true;
};

struct SolverState {
  Field u;
  double residual_norm = 0.0;
  int step = 0;
  double damping = 0.0;
  bool admissible = false;
};

enum class SolveStatus { Converged, StepUnderflow, MaxIterations };
const char* solve_status_name(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::MaxIterations;
  SolverState state;
  std::vector<TraceRow> trace;

  bool converged() const { return status == SolveStatus::Converged; }
};

/// F(curvatures) - f at every interior node, zero on boundary nodes. Throws
/// SingularNodeError when sigma_k vanishes at a node.
Field residual(const Field& u, const ProblemSpec& spec);

/// All interior discrete curvatures strictly positive.
bool admissible(const Field& u, const ProblemSpec& spec);

/// Directional derivative of `residual` at u in direction v, assembled from
/// the spectral derivative chained through the Du and D2u stencils.
Field jacobian_apply(const Field& u, const ProblemSpec& spec, const Field& v);

/// Damped Newton iteration with admissibility-gated monotone line search.
/// Throws std::domain_error when no admissible initial iterate can be built;
/// other failures are reported through SolveResult::status with the trace.
SolveResult newton_solve(const ProblemSpec& spec, const SolverConfig& config = {});

/// Builds a problem whose exact discrete solution is u_star sampled on the
/// grid: the right-hand side is the solver's own discrete F of u_star.
/// Throws std::invalid_argument if u_star is not discretely convex.
ProblemSpec manufacture(const AnalyticSurface& u_star, int k, double r, int m);

double max_abs(const Field& f);

/// CSV schema: iter,residual_max,step_length,admissible
void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

}  // namespace cq
