#include "cq/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cq/io.hpp"
#include "cq/parallel.hpp"
#include "cq/quotient.hpp"

namespace cq {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double squared_norm(std::span<const double> x) {
  double out = 0.0;
  for (double v : x) out += v * v;
  return out;
}

/// Axis derivative of a field that may contain NaN sentinels: centered when
/// both neighbors are finite, one-sided toward the usable side otherwise.
double guarded_d1(const GridLayout& g, const Field& f, int axis, long long node) {
  const long long s = g.stride(axis);
  const int i = g.axis_index(node, axis);
  const double h = g.h();
  const auto v = [&](long long off) {
    return f[static_cast<std::size_t>(node + off * s)];
  };
  const bool plus = i + 1 < g.m() && std::isfinite(v(1));
  const bool minus = i - 1 >= 0 && std::isfinite(v(-1));
  if (plus && minus) return (v(1) - v(-1)) / (2.0 * h);
  if (plus && i + 2 < g.m() && std::isfinite(v(2)))
    return (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h);
  if (minus && i - 2 >= 0 && std::isfinite(v(-2)))
    return (3.0 * v(0) - 4.0 * v(-1) + v(-2)) / (2.0 * h);
  if (plus) return (v(1) - v(0)) / h;
  if (minus) return (v(0) - v(-1)) / h;
  return 0.0;
}

struct AuxTerms {
  double rho = 0.0;
  double lambda1 = 0.0;
  double value = 0.0;
};

AuxTerms aux_terms(const GridLayout& grid, double u_value,
                   const Eigen::VectorXd& du, double w, double lambda1,
                   std::span<const double> x, double alpha, double beta) {
  AuxTerms out;
  out.rho = 1.0 - squared_norm(x) / (grid.r() * grid.r());
  out.lambda1 = lambda1;
  if (out.rho <= 0.0 || lambda1 <= 1.0) {
    out.value = kNan;
    return out;
  }
  // X = (x, u), nu = (-Du, 1)/w
  double x_dot_nu = u_value;
  for (int a = 0; a < grid.dim(); ++a)
    x_dot_nu -= x[static_cast<std::size_t>(a)] * du[a];
  x_dot_nu /= w;
  const double nu_e = 1.0 / w;
  out.value = 2.0 * std::log(out.rho) + std::log(std::log(lambda1)) -
              beta * x_dot_nu / nu_e + alpha / (nu_e * nu_e);
  return out;
}

}  // namespace

TheoremDiagnostics curvature_report(const Field& u, const ProblemSpec& spec) {
  const GridLayout& grid = spec.grid;
  const GraphPatch patch(grid, u);
  const GeometryFields fields = derive_fields(patch);

  TheoremDiagnostics out;
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  const double half = grid.r() / 2.0;

  Field f_samples = grid.make_field();
  double m_c1 = 0.0;
  double f_min = std::numeric_limits<double>::infinity();
  double f_c2 = 0.0;
  out.sup_lambda1_inner = -std::numeric_limits<double>::infinity();
  for (long long node = 0; node < grid.num_nodes(); ++node) {
    const auto idx = static_cast<std::size_t>(node);
    grid.coords(node, x);

    if (grid.is_interior(node) &&
        fields.curvature[static_cast<std::size_t>(grid.dim() - 1)][idx] <= 0.0)
      throw std::domain_error("curvature_report: inadmissible field");

    const double f = spec.rhs(x);
    f_samples[idx] = f;
    f_min = std::min(f_min, f);
    f_c2 = std::max(f_c2, std::abs(f));

    m_c1 = std::max(m_c1, std::abs(u[idx]));
    for (int a = 0; a < grid.dim(); ++a)
      m_c1 = std::max(m_c1, std::abs(fields.du[static_cast<std::size_t>(a)][idx]));

    if (squared_norm(x) <= half * half) {
      const double lambda1 = fields.curvature[0][idx];
      if (lambda1 > out.sup_lambda1_inner) {
        out.sup_lambda1_inner = lambda1;
        out.location_node = node;
        out.location.assign(x.begin(), x.end());
      }
    }
  }

  for (long long node = 0; node < grid.num_nodes(); ++node) {
    for (int a = 0; a < grid.dim(); ++a) {
      f_c2 = std::max(f_c2, std::abs(d1_at(grid, f_samples, a, node)));
      f_c2 = std::max(f_c2, std::abs(d2_at(grid, f_samples, a, node)));
    }
    if (grid.is_interior(node)) {
      for (int a = 0; a < grid.dim(); ++a)
        for (int b = a + 1; b < grid.dim(); ++b) {
          const long long sa = grid.stride(a), sb = grid.stride(b);
          const double cross =
              (f_samples[static_cast<std::size_t>(node + sa + sb)] -
               f_samples[static_cast<std::size_t>(node + sa - sb)] -
               f_samples[static_cast<std::size_t>(node - sa + sb)] +
               f_samples[static_cast<std::size_t>(node - sa - sb)]) /
              (4.0 * grid.h() * grid.h());
          f_c2 = std::max(f_c2, std::abs(cross));
        }
    }
  }

  out.f_min = f_min;
  out.f_c2_norm = f_c2;
  out.m_c1_norm = m_c1;
  return out;
}

double aux_p(const Field& u, const ProblemSpec& spec, double alpha, double beta,
             long long node) {
  if (alpha < 0.0 || beta < 0.0)
    throw std::invalid_argument("aux_p: alpha and beta must be nonnegative");
  const GridLayout& grid = spec.grid;
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  grid.coords(node, x);
  const double rho = 1.0 - squared_norm(x) / (grid.r() * grid.r());
  if (rho <= 0.0)
    throw std::domain_error("aux_p: node lies outside the inscribed ball");

  // Local centered stencils; every node with rho > 0 is interior in each axis.
  const int dim = grid.dim();
  Eigen::VectorXd p(dim);
  Eigen::MatrixXd s(dim, dim);
  for (int a = 0; a < dim; ++a) {
    p[a] = d1_at(grid, u, a, node);
    s(a, a) = d2_at(grid, u, a, node);
    for (int b = a + 1; b < dim; ++b) {
      const long long sa = grid.stride(a), sb = grid.stride(b);
      const double cross = (u[static_cast<std::size_t>(node + sa + sb)] -
                            u[static_cast<std::size_t>(node + sa - sb)] -
                            u[static_cast<std::size_t>(node - sa + sb)] +
                            u[static_cast<std::size_t>(node - sa - sb)]) /
                           (4.0 * grid.h() * grid.h());
      s(a, b) = cross;
      s(b, a) = cross;
    }
  }
  const double w = std::sqrt(1.0 + p.squaredNorm());
  const Eigen::MatrixXd gamma = tilt_projector(p, w);
  Eigen::MatrixXd shape = gamma * s * gamma / w;
  shape = 0.5 * (shape + shape.transpose()).eval();
  const SymmetricEigen eig = symmetric_eigen_descending(shape);
  if (eig.values[0] <= 1.0)
    throw std::domain_error("aux_p: lambda_1 <= 1, log log undefined");

  const AuxTerms terms = aux_terms(grid, u[static_cast<std::size_t>(node)], p, w,
                                   eig.values[0], x, alpha, beta);
  return terms.value;
}

AuxMax aux_p_max(const Field& u, const ProblemSpec& spec, double alpha,
                 double beta) {
  if (alpha < 0.0 || beta < 0.0)
    throw std::invalid_argument("aux_p_max: alpha and beta must be nonnegative");
  const GridLayout& grid = spec.grid;
  const GraphPatch patch(grid, u);
  const GeometryFields fields = derive_fields(patch);

  Field pfield(static_cast<std::size_t>(grid.num_nodes()), kNan);
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  AuxMax best;
  best.value = -std::numeric_limits<double>::infinity();
  for (long long node = 0; node < grid.num_nodes(); ++node) {
    const auto idx = static_cast<std::size_t>(node);
    grid.coords(node, x);
    const AuxTerms terms =
        aux_terms(grid, u[idx], fields.gradient_at(node), fields.w[idx],
                  fields.curvature[0][idx], x, alpha, beta);
    pfield[idx] = terms.value;
    if (std::isfinite(terms.value) && terms.value > best.value) {
      best.node = node;
      best.coords.assign(x.begin(), x.end());
      best.value = terms.value;
      best.rho2_log_lambda1 = terms.rho * terms.rho * std::log(terms.lambda1);
    }
  }
  if (best.node < 0)
    throw std::domain_error("aux_p_max: no eligible node (rho > 0, lambda_1 > 1)");

  // Tangential gradient: coordinate gradient of P projected by gamma.
  const int dim = grid.dim();
  Eigen::VectorXd dp(dim);
  for (int a = 0; a < dim; ++a) dp[a] = guarded_d1(grid, pfield, a, best.node);
  const Eigen::VectorXd du = fields.gradient_at(best.node);
  const Eigen::MatrixXd gamma =
      tilt_projector(du, fields.w[static_cast<std::size_t>(best.node)]);
  best.grad_residual = (gamma * dp).cwiseAbs().maxCoeff();
  return best;
}

struct JacobiDiagnostic::Impl {
  ProblemSpec spec;
  GeometryFields fields;
  MetricWork metric;
  Field b;  // ln lambda_1, NaN where undefined

  Impl(const Field& u, const ProblemSpec& problem)
      : spec(problem),
        fields(derive_fields(GraphPatch(problem.grid, u))),
        metric(build_metric_work(fields)),
        b(static_cast<std::size_t>(problem.grid.num_nodes()), kNan) {
    const GridLayout& grid = problem.grid;
    for (long long node = 0; node < grid.num_nodes(); ++node) {
      const double lambda1 = fields.curvature[0][static_cast<std::size_t>(node)];
      if (lambda1 > 0.0) b[static_cast<std::size_t>(node)] = std::log(lambda1);
    }
  }

  /// lambda_1 simple (gap > 10 h) on the node and its Chebyshev-1 neighborhood.
  bool gap_ok(long long node) const {
    const GridLayout& grid = spec.grid;
    const int dim = grid.dim();
    const double need = 10.0 * grid.h();
    std::vector<int> idx(static_cast<std::size_t>(dim));
    grid.multi_index(node, idx);
    std::vector<int> offset(static_cast<std::size_t>(dim), -1);
    for (;;) {
      long long neighbor = 0;
      bool in_grid = true;
      for (int a = 0; a < dim; ++a) {
        const int i =
            idx[static_cast<std::size_t>(a)] + offset[static_cast<std::size_t>(a)];
        if (i < 0 || i >= grid.m()) {
          in_grid = false;
          break;
        }
        neighbor += static_cast<long long>(i) * grid.stride(a);
      }
      if (in_grid) {
        const auto nidx = static_cast<std::size_t>(neighbor);
        const double l1 = fields.curvature[0][nidx];
        const double l2 = fields.curvature[1][nidx];
        if (!(l1 > 0.0) || !(l1 - l2 > need)) return false;
      }
      int a = 0;
      for (; a < dim; ++a) {
        if (++offset[static_cast<std::size_t>(a)] <= 1) break;
        offset[static_cast<std::size_t>(a)] = -1;
      }
      if (a == dim) break;
    }
    return true;
  }

  std::optional<double> slack(long long node, double c_candidate) const {
    const GridLayout& grid = spec.grid;
    if (grid.depth(node) < 3)
      throw std::invalid_argument("jacobi_slack: node within 3 nodes of the boundary");
    if (!gap_ok(node)) return std::nullopt;

    const int dim = grid.dim();
    // Covariant Hessian of b in base coordinates.
    Eigen::VectorXd db(dim);
    Eigen::MatrixXd hess(dim, dim);
    for (int a = 0; a < dim; ++a) {
      db[a] = d1_at(grid, b, a, node);
      hess(a, a) = d2_at(grid, b, a, node);
      for (int c = a + 1; c < dim; ++c) {
        const long long sa = grid.stride(a), sc = grid.stride(c);
        const double cross = (b[static_cast<std::size_t>(node + sa + sc)] -
                              b[static_cast<std::size_t>(node + sa - sc)] -
                              b[static_cast<std::size_t>(node - sa + sc)] +
                              b[static_cast<std::size_t>(node - sa - sc)]) /
                             (4.0 * grid.h() * grid.h());
        hess(a, c) = cross;
        hess(c, a) = cross;
      }
    }
    if (!db.allFinite() || !hess.allFinite()) return std::nullopt;
    for (int a = 0; a < dim; ++a)
      for (int c = a; c < dim; ++c) {
        double corr = 0.0;
        for (int l = 0; l < dim; ++l)
          corr += metric.gamma_at(node, l, a, c) * db[l];
        hess(a, c) -= corr;
        hess(c, a) = hess(a, c);
      }

    const Eigen::MatrixXd shape = fields.shape_at(node);
    const SymmetricEigen eig = symmetric_eigen_descending(shape);
    const Eigen::VectorXd du = fields.gradient_at(node);
    const double w = fields.w[static_cast<std::size_t>(node)];
    const Eigen::MatrixXd gamma = tilt_projector(du, w);

    Spectrum lam(std::vector<double>(eig.values.data(), eig.values.data() + dim));
    const OperatorJet j = jet(spec.op, lam);

    double slack = 0.0;
    const double lambda1 = eig.values[0];
    for (int p = 0; p < dim; ++p) {
      const Eigen::VectorXd dir = gamma * eig.vectors.col(p);
      const double b_p = dir.dot(db);
      const double b_pp = dir.dot(hess * dir);
      slack += j.grad[p] * b_pp - c_candidate * j.grad[p] * b_p * b_p -
               j.grad[p] * eig.values[p] * lambda1 +
               j.grad[p] * eig.values[p] * eig.values[p];
    }
    return slack;
  }
};

JacobiDiagnostic::JacobiDiagnostic(const Field& u, const ProblemSpec& spec)
    : impl_(std::make_unique<Impl>(u, spec)) {}

JacobiDiagnostic::~JacobiDiagnostic() = default;
JacobiDiagnostic::JacobiDiagnostic(JacobiDiagnostic&&) noexcept = default;

std::optional<double> JacobiDiagnostic::slack(long long node,
                                              double c_candidate) const {
  return impl_->slack(node, c_candidate);
}

JacobiScan JacobiDiagnostic::scan(double c_candidate) const {
  const GridLayout& grid = impl_->spec.grid;
  JacobiScan out;
  out.min_slack = std::numeric_limits<double>::infinity();
  for (long long node = 0; node < grid.num_nodes(); ++node) {
    if (grid.depth(node) < 3) continue;
    const auto value = impl_->slack(node, c_candidate);
    if (!value) continue;
    ++out.eligible;
    if (*value < out.min_slack) {
      out.min_slack = *value;
      out.argmin_node = node;
    }
  }
  if (out.eligible == 0) out.min_slack = 0.0;
  return out;
}

std::optional<double> jacobi_slack(const Field& u, const ProblemSpec& spec,
                                   long long node, double c_candidate) {
  return JacobiDiagnostic(u, spec).slack(node, c_candidate);
}

SweepReport run_sweep(const SweepConfig& config) {
  SweepReport report;
  report.rows.resize(config.problems.size());

  parallel_jobs(static_cast<long long>(config.problems.size()), [&](long long i) {
    const SweepProblem& problem = config.problems[static_cast<std::size_t>(i)];
    SweepRow& row = report.rows[static_cast<std::size_t>(i)];
    row.problem = problem.name;
    row.n = problem.spec.op.n;
    row.k = problem.spec.op.k;
    row.r = problem.spec.grid.r();
    row.m = problem.spec.grid.m();
    try {
      const SolveResult result = newton_solve(problem.spec, config.solver);
      row.iters = result.state.step;
      row.residual = result.state.residual_norm;
      if (!result.converged()) {
        row.status = solve_status_name(result.status);
        return;
      }
      row.status = "ok";
      row.solved = true;

      const TheoremDiagnostics diag = curvature_report(result.state.u, problem.spec);
      row.f_min = diag.f_min;
      row.f_c2 = diag.f_c2_norm;
      row.m_c1 = diag.m_c1_norm;
      row.sup_lambda1_inner = diag.sup_lambda1_inner;
      row.sup_location = diag.location;

      try {
        const AuxMax aux =
            aux_p_max(result.state.u, problem.spec, config.alpha, config.beta);
        row.has_aux = true;
        row.p_max = aux.value;
        row.p_grad_residual = aux.grad_residual;
        row.rho2_log_lambda1 = aux.rho2_log_lambda1;
      } catch (const std::domain_error&) {
        row.has_aux = false;  // no node with lambda_1 > 1
      }

      const double c = config.c_candidate
                           ? *config.c_candidate
                           : 1.0 / (2.0 * (problem.spec.op.n - 1));
      const JacobiDiagnostic jacobi(result.state.u, problem.spec);
      const JacobiScan scan = jacobi.scan(c);
      row.jacobi_nodes = scan.eligible;
      row.jacobi_min = scan.min_slack;
      row.has_jacobi = scan.eligible > 0;
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
  });
  return report;
}

void write_sweep_csv(const SweepReport& report, const std::string& path) {
  std::string out =
      "problem,status,n,k,r,m,iters,residual_max,f_min,f_c2_norm,m_c1_norm,"
      "sup_lambda1_inner,sup_location,p_max,p_grad_residual,rho2_loglambda1,"
      "jacobi_min,jacobi_eligible_nodes\n";
  for (const auto& row : report.rows) {
    out += csv_quote(row.problem);
    out += ',' + csv_quote(row.status);
    out += ',' + std::to_string(row.n);
    out += ',' + std::to_string(row.k);
    out += ',' + format_double(row.r);
    out += ',' + std::to_string(row.m);
    out += ',' + std::to_string(row.iters);
    out += ',' + format_double(row.residual);
    if (row.solved) {
      out += ',' + format_double(row.f_min);
      out += ',' + format_double(row.f_c2);
      out += ',' + format_double(row.m_c1);
      out += ',' + format_double(row.sup_lambda1_inner);
      out += ',' + csv_quote(format_json_array(row.sup_location));
    } else {
      out += ",,,,,";
    }
    if (row.has_aux) {
      out += ',' + format_double(row.p_max);
      out += ',' + format_double(row.p_grad_residual);
      out += ',' + format_double(row.rho2_log_lambda1);
    } else {
      out += ",,,";
    }
    if (row.has_jacobi)
      out += ',' + format_double(row.jacobi_min);
    else
      out += ",";
    out += ',' + std::to_string(row.jacobi_nodes);
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace cq
