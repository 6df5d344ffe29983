#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cq/geometry.hpp"
#include "cq/solver.hpp"

namespace cq {

/// Desk-scale shadow of the interior estimate: curvature supremum on the
/// inner half-ball together with the norms the estimate's constant depends on.
struct TheoremDiagnostics {
  double sup_lambda1_inner = 0.0;  // max lambda_1 over |x| <= r/2
  long long location_node = -1;
  std::vector<double> location;
  double f_c2_norm = 0.0;  // max of |f|, |Df|, |D2f| sampled on the grid
  double f_min = 0.0;
  double m_c1_norm = 0.0;  // max of |u| and |Du|
};

/// Requires an admissible u; throws std::domain_error otherwise.
TheoremDiagnostics curvature_report(const Field& u, const ProblemSpec& spec);

/// P = 2 log rho + log log lambda_1 - beta (X,nu)/(nu,E_{n+1}) + alpha/(nu,E_{n+1})^2
/// with rho = 1 - |x|^2/r^2 on the inscribed ball. Requires rho > 0 and
/// lambda_1 > 1 at the node; alpha, beta >= 0.
double aux_p(const Field& u, const ProblemSpec& spec, double alpha, double beta,
             long long node);

struct AuxMax {
  long long node = -1;
  std::vector<double> coords;
  double value = 0.0;
  double grad_residual = 0.0;      // max-norm of the tangential gradient of P
  double rho2_log_lambda1 = 0.0;   // rho^2 log lambda_1 at the maximizer
};

/// Argmax of P over eligible nodes (rho > 0, lambda_1 > 1). Throws
/// std::domain_error when no node is eligible.
AuxMax aux_p_max(const Field& u, const ProblemSpec& spec, double alpha, double beta);

struct JacobiScan {
  long long eligible = 0;
  double min_slack = 0.0;
  long long argmin_node = -1;
};

/// Pointwise Jacobi-inequality slack
///   J = sum_i F^{ii} b_ii - c sum_i F^{ii} b_i^2
///       - h_11 sum_i F^{ii} h_ii + sum_i F^{ii} h_ii^2,  b = ln lambda_1,
/// with derivatives of b taken covariantly in the pointwise eigenframe. Shared
/// field preparation lives in the diagnostic object; per-node queries return
/// nullopt at nodes where lambda_1 is not simple enough (eigen-gap <= 10 h on
/// the node or a stencil neighbor).
class JacobiDiagnostic {
 public:
  JacobiDiagnostic(const Field& u, const ProblemSpec& spec);
  ~JacobiDiagnostic();
  JacobiDiagnostic(JacobiDiagnostic&&) noexcept;

  /// Requires depth(node) >= 3; throws std::invalid_argument otherwise.
  std::optional<double> slack(long long node, double c_candidate) const;

  /// Minimum slack over all eligible nodes.
  JacobiScan scan(double c_candidate) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot form of the per-node diagnostic.
std::optional<double> jacobi_slack(const Field& u, const ProblemSpec& spec,
                                   long long node, double c_candidate);

struct SweepProblem {
  std::string name;
  ProblemSpec spec;
};

struct SweepConfig {
  std::vector<SweepProblem> problems;
  SolverConfig solver;
  double alpha = 5.0;
  double beta = 2.0;
  std::optional<double> c_candidate;  // default 1/(2(n-1)) per problem
};

struct SweepRow {
  std::string problem;
  std::string status;  // "ok", a solve status, or "error: ..."
  int n = 0, k = 0, m = 0;
  double r = 0.0;
  int iters = 0;
  double residual = 0.0;
  double f_min = 0.0, f_c2 = 0.0, m_c1 = 0.0;
  double sup_lambda1_inner = 0.0;
  std::vector<double> sup_location;
  bool has_aux = false;
  double p_max = 0.0, p_grad_residual = 0.0, rho2_log_lambda1 = 0.0;
  bool has_jacobi = false;
  long long jacobi_nodes = 0;
  double jacobi_min = 0.0;
  bool solved = false;
};

struct SweepReport {
  std::vector<SweepRow> rows;
};

/// Solves every problem (in parallel) and evaluates the diagnostics; rows keep
/// config order and per-problem failures are recorded in the status column.
SweepReport run_sweep(const SweepConfig& config);

void write_sweep_csv(const SweepReport& report, const std::string& path);

}  // namespace cq
