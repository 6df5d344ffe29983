#include "cq/solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>

#include "cq/errors.hpp"
#include "cq/io.hpp"

namespace cq {

namespace {

void check_spec(const ProblemSpec& spec) {
  if (spec.op.n != spec.grid.dim())
    throw std::invalid_argument("ProblemSpec: operator and grid dimension differ");
  if (spec.op.k < 0 || spec.op.k >= spec.op.n)
    throw std::invalid_argument("ProblemSpec: 0 <= k < n required");
  if (!spec.rhs) throw std::invalid_argument("ProblemSpec: rhs evaluator missing");
  if (!spec.boundary)
    throw std::invalid_argument("ProblemSpec: boundary evaluator missing");
}

double binom(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out *= static_cast<double>(n - k + i) / i;
  return out;
}

/// Gradient, Hessian, tilt and shape operator of u at one node, gathered from
/// the materialized differential fields.
struct NodeGeometry {
  Eigen::VectorXd p;
  Eigen::MatrixXd s;
  double w = 1.0;
  Eigen::MatrixXd gamma;
  Eigen::MatrixXd shape;
};

NodeGeometry node_geometry(const GeometryFields& fields, long long node) {
  NodeGeometry out;
  out.p = fields.gradient_at(node);
  out.s = fields.hessian_at(node);
  out.w = fields.w[static_cast<std::size_t>(node)];
  out.gamma = tilt_projector(out.p, out.w);
  out.shape = out.gamma * out.s * out.gamma / out.w;
  out.shape = 0.5 * (out.shape + out.shape.transpose()).eval();
  return out;
}

struct StateEval {
  bool admissible = true;
  Field residual;
  double rmax = 0.0;
};

/// Residual plus admissibility in one pass. With `require_admissible`, bails
/// out at the first nonpositive curvature (used by the line search).
StateEval evaluate_state(const Field& u, const ProblemSpec& spec,
                         bool require_admissible) {
  const GridLayout& grid = spec.grid;
  const GraphPatch patch(grid, u);
  const GeometryFields fields = derive_differentials(patch);

  StateEval out;
  out.residual = grid.make_field();
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  for (long long node = 0; node < grid.num_nodes(); ++node) {
    if (!grid.is_interior(node)) continue;
    const NodeGeometry geom = node_geometry(fields, node);
    const SymmetricEigen eig = symmetric_eigen_descending(geom.shape);
    if (eig.values[grid.dim() - 1] <= 0.0) {
      out.admissible = false;
      if (require_admissible) return out;
    }
    grid.coords(node, x);
    double value;
    try {
      value = matrix_jet(spec.op, eig, false).value;
    } catch (const SingularDenominatorError&) {
      throw SingularNodeError("sigma_k vanishes at grid node", node);
    }
    const double res = value - spec.rhs(x);
    out.residual[static_cast<std::size_t>(node)] = res;
    out.rmax = std::max(out.rmax, std::abs(res));
  }
  return out;
}

/// d(shape)/d(Du_c) contracted against M, plus the pure D2u contraction
/// T2 = gamma M gamma / w. Together these give the chain rule
///   dF = sum_c T1_c dDu_c + sum_{cd} T2_cd dD2u_cd.
struct ChainTerms {
  Eigen::VectorXd t1;
  Eigen::MatrixXd t2;
};

ChainTerms chain_terms(const NodeGeometry& geom, const Eigen::MatrixXd& m) {
  const int dim = static_cast<int>(geom.p.size());
  ChainTerms out;
  out.t2 = geom.gamma * m * geom.gamma / geom.w;
  out.t1.resize(dim);

  const double w = geom.w;
  const Eigen::VectorXd& p = geom.p;
  const Eigen::MatrixXd sg = geom.s * geom.gamma;   // S gamma
  const Eigen::MatrixXd gs = geom.gamma * geom.s;   // gamma S
  const double denom = w * (1.0 + w);
  for (int c = 0; c < dim; ++c) {
    const double dw = p[c] / w;
    // dgamma = -(e_c p^T + p e_c^T)/(w(1+w)) + p p^T p_c (1+2w)/(w^3 (1+w)^2)
    Eigen::MatrixXd dgamma = Eigen::MatrixXd::Zero(dim, dim);
    dgamma.row(c) -= p.transpose() / denom;
    dgamma.col(c) -= p / denom;
    dgamma.noalias() +=
        p * p.transpose() * (p[c] * (1.0 + 2.0 * w) / (w * w * w * (1.0 + w) * (1.0 + w)));
    const Eigen::MatrixXd dshape = (-dw / (w * w)) * (geom.gamma * sg) +
                                   (dgamma * sg + gs * dgamma.transpose()) / w;
    out.t1[c] = (m.array() * dshape.array()).sum();
  }
  return out;
}

std::vector<long long> interior_nodes(const GridLayout& grid) {
  std::vector<long long> out;
  out.reserve(static_cast<std::size_t>(grid.num_interior()));
  for (long long node = 0; node < grid.num_nodes(); ++node)
    if (grid.is_interior(node)) out.push_back(node);
  return out;
}

Field build_initial(const ProblemSpec& spec) {
  const GridLayout& grid = spec.grid;
  const int dim = grid.dim();
  std::vector<double> x(static_cast<std::size_t>(dim));

  Field boundary_values = grid.make_field();
  for (long long node = 0; node < grid.num_nodes(); ++node) {
    grid.coords(node, x);
    if (!grid.is_interior(node))
      boundary_values[static_cast<std::size_t>(node)] = spec.boundary(x);
  }

  if (spec.initial_guess) {
    Field u = boundary_values;
    for (long long node = 0; node < grid.num_nodes(); ++node) {
      if (!grid.is_interior(node)) continue;
      grid.coords(node, x);
      u[static_cast<std::size_t>(node)] = spec.initial_guess(x);
    }
    if (!admissible(u, spec))
      throw std::domain_error("newton_solve: supplied initial guess is inadmissible");
    return u;
  }

  double mean_f = 0.0;
  long long count = 0;
  for (long long node = 0; node < grid.num_nodes(); ++node) {
    if (!grid.is_interior(node)) continue;
    grid.coords(node, x);
    const double f = spec.rhs(x);
    if (!(f > 0.0))
      throw std::invalid_argument("ProblemSpec: rhs must be strictly positive");
    mean_f += f;
    ++count;
  }
  mean_f /= static_cast<double>(count);

  // Convex quadratic with F(lambda(q)) ~ mean f at the vertex, blended to the
  // boundary data over the outer 20% of the cube. The blend runs over the
  // radius with a smoothstep weight and covers at least three node layers, and
  // the quadratic is offset to the face mean of the data; a max-norm blend
  // kinks the Hessian indefinitely at coarse m.
  double c = 0.5 * std::pow(binom(dim, spec.op.k) * mean_f,
                            1.0 / static_cast<double>(dim - spec.op.k));
  const double width =
      std::max(0.2, 3.0 * grid.h() / grid.r());
  for (int attempt = 0; attempt < 20; ++attempt) {
    double offset_mean = 0.0;
    double offset_min = std::numeric_limits<double>::infinity();
    long long faces = 0;
    for (long long node = 0; node < grid.num_nodes(); ++node) {
      if (grid.is_interior(node)) continue;
      grid.coords(node, x);
      double norm2 = 0.0;
      for (double v : x) norm2 += v * v;
      const double gap = spec.boundary(x) - c * norm2;
      offset_mean += gap;
      offset_min = std::min(offset_min, gap);
      ++faces;
    }
    offset_mean /= static_cast<double>(faces);

    Field u = boundary_values;
    for (long long node = 0; node < grid.num_nodes(); ++node) {
      if (!grid.is_interior(node)) continue;
      grid.coords(node, x);
      double norm2 = 0.0;
      for (double v : x) norm2 += v * v;
      const double t = std::sqrt(norm2) / grid.r();
      const double s0 = std::clamp((t - (1.0 - width)) / width, 0.0, 1.0);
      const double s = s0 * s0 * (3.0 - 2.0 * s0);
      u[static_cast<std::size_t>(node)] =
          (1.0 - s) * (c * norm2 + offset_mean) + s * spec.boundary(x);
    }
    if (admissible(u, spec)) return u;

    // Convexity-preserving fallback: max of the quadratic and the data, with
    // the quadratic kept below the data on every face so the crease is interior.
    for (long long node = 0; node < grid.num_nodes(); ++node) {
      if (!grid.is_interior(node)) continue;
      grid.coords(node, x);
      double norm2 = 0.0;
      for (double v : x) norm2 += v * v;
      u[static_cast<std::size_t>(node)] =
          std::max(c * norm2 + offset_min, spec.boundary(x));
    }
    if (admissible(u, spec)) return u;
    c *= 2.0;
  }
  throw std::domain_error(
      "newton_solve: automatic initial guess inadmissible after 20 attempts");
}

using Triplet = Eigen::Triplet<double>;

/// Row-compressed Jacobian over interior unknowns, lexicographic ordering.
Eigen::SparseMatrix<double> assemble_jacobian(
    const Field& u, const ProblemSpec& spec,
    const std::vector<long long>& interior,
    const std::vector<long long>& interior_index) {
  const GridLayout& grid = spec.grid;
  const int dim = grid.dim();
  const GraphPatch patch(grid, u);
  const GeometryFields fields = derive_differentials(patch);

  const double h = grid.h();
  const double inv2h = 1.0 / (2.0 * h);
  const double invh2 = 1.0 / (h * h);
  const double inv4h2 = 1.0 / (4.0 * h * h);

  std::vector<Triplet> triplets;
  triplets.reserve(interior.size() * (1 + 2 * dim + 2 * dim * (dim - 1)));

  const auto add = [&](long long row, long long col_node, double value) {
    const long long col = interior_index[static_cast<std::size_t>(col_node)];
    if (col >= 0 && value != 0.0)
      triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), value);
  };

  for (std::size_t rowi = 0; rowi < interior.size(); ++rowi) {
    const long long node = interior[rowi];
    const NodeGeometry geom = node_geometry(fields, node);
    const SymmetricEigen eig = symmetric_eigen_descending(geom.shape);
    Eigen::MatrixXd m;
    try {
      m = matrix_jet(spec.op, eig, true).derivative;
    } catch (const SingularDenominatorError&) {
      throw SingularNodeError("sigma_k vanishes at grid node", node);
    }
    const ChainTerms chain = chain_terms(geom, m);

    double center = 0.0;
    for (int c = 0; c < dim; ++c) {
      const long long sc = grid.stride(c);
      // Du_c: (u_{+c} - u_{-c}) / 2h
      add(static_cast<long long>(rowi), node + sc, chain.t1[c] * inv2h);
      add(static_cast<long long>(rowi), node - sc, -chain.t1[c] * inv2h);
      // D2u_cc: (u_{+c} - 2 u_0 + u_{-c}) / h^2
      add(static_cast<long long>(rowi), node + sc, chain.t2(c, c) * invh2);
      add(static_cast<long long>(rowi), node - sc, chain.t2(c, c) * invh2);
      center += -2.0 * chain.t2(c, c) * invh2;
      // D2u_cd, c < d: 4-point cross, entering twice via symmetry of t2
      for (int d = c + 1; d < dim; ++d) {
        const long long sd = grid.stride(d);
        const double wgt = 2.0 * chain.t2(c, d) * inv4h2;
        add(static_cast<long long>(rowi), node + sc + sd, wgt);
        add(static_cast<long long>(rowi), node - sc - sd, wgt);
        add(static_cast<long long>(rowi), node + sc - sd, -wgt);
        add(static_cast<long long>(rowi), node - sc + sd, -wgt);
      }
    }
    add(static_cast<long long>(rowi), node, center);
  }

  Eigen::SparseMatrix<double> jac(static_cast<int>(interior.size()),
                                  static_cast<int>(interior.size()));
  jac.setFromTriplets(triplets.begin(), triplets.end());
  return jac;
}

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& jac,
                             const Eigen::VectorXd& rhs, double lin_tol) {
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> krylov;
  krylov.setTolerance(lin_tol);
  krylov.preconditioner().setDroptol(1e-3);
  krylov.preconditioner().setFillfactor(8);
  krylov.compute(jac);
  if (krylov.info() == Eigen::Success) {
    Eigen::VectorXd delta = krylov.solve(rhs);
    if (krylov.info() == Eigen::Success && delta.allFinite()) {
      const double relres = (jac * delta - rhs).norm() / std::max(rhs.norm(), 1e-300);
      if (relres <= 100.0 * lin_tol) return delta;
    }
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(jac);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("newton_solve: Jacobian factorization failed");
  Eigen::VectorXd delta = lu.solve(rhs);
  if (!delta.allFinite())
    throw std::runtime_error("newton_solve: linear solve produced non-finite step");
  return delta;
}

}  // namespace

const char* solve_status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::StepUnderflow: return "step_underflow";
    case SolveStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

Field residual(const Field& u, const ProblemSpec& spec) {
  check_spec(spec);
  return evaluate_state(u, spec, false).residual;
}

bool admissible(const Field& u, const ProblemSpec& spec) {
  const GridLayout& grid = spec.grid;
  const GraphPatch patch(grid, u);
  const GeometryFields fields = derive_differentials(patch);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  for (long long node = 0; node < grid.num_nodes(); ++node) {
    if (!grid.is_interior(node)) continue;
    const NodeGeometry geom = node_geometry(fields, node);
    eig.compute(geom.shape, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues()[0] <= 0.0) return false;
  }
  return true;
}

Field jacobian_apply(const Field& u, const ProblemSpec& spec, const Field& v) {
  check_spec(spec);
  const GridLayout& grid = spec.grid;
  if (v.size() != u.size())
    throw std::invalid_argument("jacobian_apply: direction size mismatch");
  const GraphPatch patch(grid, u);
  const GeometryFields fields = derive_differentials(patch);
  const GraphPatch vpatch(grid, v);
  const GeometryFields vfields = derive_differentials(vpatch);

  Field out = grid.make_field();
  for (long long node = 0; node < grid.num_nodes(); ++node) {
    if (!grid.is_interior(node)) continue;
    const NodeGeometry geom = node_geometry(fields, node);
    const SymmetricEigen eig = symmetric_eigen_descending(geom.shape);
    Eigen::MatrixXd m;
    try {
      m = matrix_jet(spec.op, eig, true).derivative;
    } catch (const SingularDenominatorError&) {
      throw SingularNodeError("sigma_k vanishes at grid node", node);
    }
    const ChainTerms chain = chain_terms(geom, m);
    const Eigen::VectorXd dp = vfields.gradient_at(node);
    const Eigen::MatrixXd ds = vfields.hessian_at(node);
    out[static_cast<std::size_t>(node)] =
        chain.t1.dot(dp) + (chain.t2.array() * ds.array()).sum();
  }
  return out;
}

SolveResult newton_solve(const ProblemSpec& spec, const SolverConfig& config) {
  check_spec(spec);
  if (!(config.tol_residual > 0.0) || config.max_iters <= 0 ||
      !(config.backtrack > 0.0 && config.backtrack < 1.0) ||
      !(config.min_step > 0.0) || !(config.lin_tol > 0.0))
    throw std::invalid_argument("SolverConfig: all parameters must be positive");

  const GridLayout& grid = spec.grid;
  const std::vector<long long> interior = interior_nodes(grid);
  std::vector<long long> interior_index(static_cast<std::size_t>(grid.num_nodes()), -1);
  for (std::size_t i = 0; i < interior.size(); ++i)
    interior_index[static_cast<std::size_t>(interior[i])] = static_cast<long long>(i);

  SolveResult result;
  result.status = SolveStatus::MaxIterations;
  Field u = build_initial(spec);
  StateEval state = evaluate_state(u, spec, false);
  result.trace.push_back({0, state.rmax, 0.0, state.admissible});

  if (state.rmax <= config.tol_residual) result.status = SolveStatus::Converged;

  for (int iter = 1;
       iter <= config.max_iters && result.status == SolveStatus::MaxIterations;
       ++iter) {
    Eigen::VectorXd rhs(interior.size());
    for (std::size_t i = 0; i < interior.size(); ++i)
      rhs[static_cast<Eigen::Index>(i)] =
          -state.residual[static_cast<std::size_t>(interior[i])];

    const Eigen::SparseMatrix<double> jac =
        assemble_jacobian(u, spec, interior, interior_index);
    const Eigen::VectorXd delta = solve_linear(jac, rhs, config.lin_tol);

    double step = 1.0;
    bool accepted = false;
    while (step >= config.min_step) {
      Field trial = u;
      for (std::size_t i = 0; i < interior.size(); ++i)
        trial[static_cast<std::size_t>(interior[i])] +=
            step * delta[static_cast<Eigen::Index>(i)];
      std::optional<StateEval> trial_state;
      try {
        StateEval eval = evaluate_state(trial, spec, true);
        if (eval.admissible) trial_state = std::move(eval);
      } catch (const SingularNodeError&) {
        // inadmissible trial; keep backtracking
      }
      if (trial_state && trial_state->rmax < state.rmax) {
        u = std::move(trial);
        state = std::move(*trial_state);
        result.trace.push_back({iter, state.rmax, step, true});
        accepted = true;
        break;
      }
      step *= config.backtrack;
    }
    if (!accepted)
      result.status = SolveStatus::StepUnderflow;
    else if (state.rmax <= config.tol_residual)
      result.status = SolveStatus::Converged;
  }

  result.state.u = std::move(u);
  result.state.residual_norm = state.rmax;
  result.state.step = static_cast<int>(result.trace.size()) - 1;
  result.state.damping = result.trace.back().step_length;
  result.state.admissible = state.admissible;
  return result;
}

ProblemSpec manufacture(const AnalyticSurface& u_star, int k, double r, int m) {
  const int dim = u_star.dim();
  const GridLayout grid(dim, r, m);
  const QuotientOperator op{dim, k};

  GraphPatch patch = u_star.sample(r, m);
  const GeometryFields fields = derive_fields(patch);

  auto rhs_field = std::make_shared<Field>(grid.make_field());
  for (long long node = 0; node < grid.num_nodes(); ++node) {
    const auto curv = fields.curvatures_at(node);
    if (grid.is_interior(node) && curv[static_cast<std::size_t>(dim - 1)] <= 0.0)
      throw std::invalid_argument("manufacture: u_star is not discretely convex");
    Spectrum lam{std::vector<double>(curv.begin(), curv.end())};
    (*rhs_field)[static_cast<std::size_t>(node)] = f_value(op, lam);
  }

  const double h = grid.h();
  auto lookup = [grid, rhs_field, r, h](std::span<const double> x) {
    long long node = 0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double pos = (x[static_cast<std::size_t>(a)] + r) / h;
      const int idx = static_cast<int>(std::lround(pos));
      if (idx < 0 || idx >= grid.m() ||
          std::abs(pos - idx) > 1e-6)
        throw std::invalid_argument("manufactured rhs queried off the grid");
      node += idx * grid.stride(a);
    }
    return (*rhs_field)[static_cast<std::size_t>(node)];
  };

  ProblemSpec spec{op, grid, lookup,
                   [u_star](std::span<const double> x) { return u_star.value(x); },
                   Evaluator{}};
  return spec;
}

double max_abs(const Field& f) {
  double out = 0.0;
  for (double v : f) out = std::max(out, std::abs(v));
  return out;
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
  std::string out = "iter,residual_max,step_length,admissible\n";
  for (const auto& row : trace) {
    out += std::to_string(row.iter);
    out += ',' + format_double(row.residual_max);
    out += ',' + format_double(row.step_length);
    out += ',' + std::string(row.admissible ? "1" : "0");
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace cq
