#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cq/errors.hpp"
#include "cq/rng.hpp"
#include "cq/solver.hpp"

using namespace cq;

namespace {

Field sample_on_grid(const AnalyticSurface& surface, const GridLayout& grid) {
  Field u = grid.make_field();
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  for (long long node = 0; node < grid.num_nodes(); ++node) {
    grid.coords(node, x);
    u[static_cast<std::size_t>(node)] = surface.value(x);
  }
  return u;
}

ProblemSpec sphere_cap_problem(double radius, double r, int m) {
  const AnalyticSurface cap =
      AnalyticSurface::make(SurfaceKind::Sphere, 3, {radius});
  const double f = 1.0 / (3.0 * radius * radius);
  return ProblemSpec{curvature_quotient(3), GridLayout(3, r, m),
                     [f](std::span<const double>) { return f; },
                     [cap](std::span<const double> x) { return cap.value(x); },
                     Evaluator{}};
}

const AnalyticSurface& quartic_bowl() {
  static const AnalyticSurface surface = AnalyticSurface::make(
      SurfaceKind::Quartic, 3, {1.0, 1.0, 1.0, 1.0, 0.0, 0.0});
  return surface;
}

}  // namespace

TEST_CASE("residual vanishes identically on a manufactured solution") {
  const ProblemSpec spec = manufacture(quartic_bowl(), 1, 1.0, 11);
  const Field u = sample_on_grid(quartic_bowl(), spec.grid);
  const Field res = residual(u, spec);
  CHECK(max_abs(res) <= 1e-14);
  for (long long node = 0; node < spec.grid.num_nodes(); ++node)
    if (!spec.grid.is_interior(node))
      CHECK(res[static_cast<std::size_t>(node)] == 0.0);
}

TEST_CASE("residual of the exact sphere cap shrinks at second order") {
  const AnalyticSurface cap = AnalyticSurface::make(SurfaceKind::Sphere, 3, {2.0});
  const ProblemSpec coarse = sphere_cap_problem(2.0, 0.5, 9);
  const ProblemSpec fine = sphere_cap_problem(2.0, 0.5, 17);
  const double res_coarse = max_abs(residual(sample_on_grid(cap, coarse.grid), coarse));
  const double res_fine = max_abs(residual(sample_on_grid(cap, fine.grid), fine));
  CHECK(res_coarse / res_fine >= 2.5);
  CHECK(res_coarse / res_fine <= 6.0);
}

TEST_CASE("residual sign follows monotonicity of F") {
  const GridLayout grid(3, 0.5, 9);
  const AnalyticSurface steep =
      AnalyticSurface::make(SurfaceKind::Paraboloid, 3, {5.0});
  const ProblemSpec spec{
      curvature_quotient(3), grid,
      [](std::span<const double>) { return 1e-6; },
      [steep](std::span<const double> x) { return steep.value(x); },
      Evaluator{}};
  const Field res = residual(sample_on_grid(steep, grid), spec);
  for (long long node = 0; node < grid.num_nodes(); ++node)
    if (grid.is_interior(node))
      CHECK(res[static_cast<std::size_t>(node)] > 0.0);
}

TEST_CASE("jacobian_apply: zero direction, linearity, finite differences") {
  const ProblemSpec spec = manufacture(quartic_bowl(), 1, 1.0, 9);
  const Field u = sample_on_grid(quartic_bowl(), spec.grid);
  const std::size_t size = u.size();

  const Field zero(size, 0.0);
  CHECK(max_abs(jacobian_apply(u, spec, zero)) == 0.0);

  Rng rng(83);
  Field v(size), w(size);
  for (std::size_t i = 0; i < size; ++i) {
    v[i] = rng.normal();
    w[i] = rng.normal();
  }
  const double a = 1.7, b = -0.45;
  Field combo(size);
  for (std::size_t i = 0; i < size; ++i) combo[i] = a * v[i] + b * w[i];
  const Field jv = jacobian_apply(u, spec, v);
  const Field jw = jacobian_apply(u, spec, w);
  const Field jcombo = jacobian_apply(u, spec, combo);
  double worst_lin = 0.0;
  double scale_lin = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    worst_lin = std::max(worst_lin, std::abs(jcombo[i] - a * jv[i] - b * jw[i]));
    scale_lin = std::max(scale_lin, std::abs(jcombo[i]));
  }
  CHECK(worst_lin <= 1e-12 * (1.0 + scale_lin));

  const double eps = 1e-6 * std::max(1.0, max_abs(u));
  for (int rep = 0; rep < 5; ++rep) {
    Field dir(size);
    for (std::size_t i = 0; i < size; ++i) dir[i] = rng.normal();
    Field up = u, down = u;
    for (std::size_t i = 0; i < size; ++i) {
      up[i] += eps * dir[i];
      down[i] -= eps * dir[i];
    }
    const Field res_up = residual(up, spec);
    const Field res_down = residual(down, spec);
    const Field applied = jacobian_apply(u, spec, dir);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      const double fd = (res_up[i] - res_down[i]) / (2.0 * eps);
      worst = std::max(worst, std::abs(applied[i] - fd));
      scale = std::max(scale, std::abs(fd));
    }
    CHECK(worst <= 1e-6 * (1.0 + scale));
  }
}

TEST_CASE("newton solves the manufactured quartic problem to discrete exactness") {
  const ProblemSpec spec = manufacture(quartic_bowl(), 1, 1.0, 11);
  SolverConfig config;
  const SolveResult result = newton_solve(spec, config);
  REQUIRE(result.converged());
  CHECK(result.state.residual_norm <= config.tol_residual);
  CHECK(result.state.admissible);
  CHECK(result.trace.size() <= 16);

  const Field exact = sample_on_grid(quartic_bowl(), spec.grid);
  double err = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i)
    err = std::max(err, std::abs(exact[i] - result.state.u[i]));
  CHECK(err <= 1e-8);

  // strictly decreasing residual trace on accepted steps
  for (std::size_t i = 1; i < result.trace.size(); ++i)
    CHECK(result.trace[i].residual_max < result.trace[i - 1].residual_max);
}

TEST_CASE("newton recovers the sphere cap from constant data at second order") {
  const AnalyticSurface cap = AnalyticSurface::make(SurfaceKind::Sphere, 3, {2.0});
  double errors[2];
  int index = 0;
  for (int m : {9, 17}) {
    const ProblemSpec spec = sphere_cap_problem(2.0, 0.5, m);
    const SolveResult result = newton_solve(spec, SolverConfig{});
    REQUIRE(result.converged());
    const Field exact = sample_on_grid(cap, spec.grid);
    double err = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i)
      err = std::max(err, std::abs(exact[i] - result.state.u[i]));
    errors[index++] = err;
  }
  CHECK(errors[0] / errors[1] >= 2.5);
  CHECK(errors[0] / errors[1] <= 6.5);
}

TEST_CASE("two-dimensional Monge-Ampere validation instance") {
  const AnalyticSurface bowl = AnalyticSurface::make(
      SurfaceKind::Quartic, 2, {1.0, 2.0, 0.5, 0.5});
  const ProblemSpec spec = manufacture(bowl, 0, 0.8, 17);
  const SolveResult result = newton_solve(spec, SolverConfig{});
  REQUIRE(result.converged());
  const Field exact = sample_on_grid(bowl, spec.grid);
  double err = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i)
    err = std::max(err, std::abs(exact[i] - result.state.u[i]));
  CHECK(err <= 1e-8);
}

TEST_CASE("newton failure modes are reported, not thrown") {
  ProblemSpec spec = sphere_cap_problem(2.0, 0.5, 9);
  SolverConfig tight;
  tight.max_iters = 1;
  tight.tol_residual = 1e-15;
  const SolveResult result = newton_solve(spec, tight);
  CHECK_FALSE(result.converged());
  CHECK(result.status == SolveStatus::MaxIterations);
  CHECK(result.trace.size() >= 1);
}

TEST_CASE("inadmissible explicit initial guess throws") {
  ProblemSpec spec = sphere_cap_problem(2.0, 0.5, 9);
  spec.initial_guess = [](std::span<const double> x) {
    double norm2 = 0.0;
    for (double v : x) norm2 += v * v;
    return -norm2;  // concave start
  };
  CHECK_THROWS_AS(newton_solve(spec, SolverConfig{}), std::domain_error);
}

TEST_CASE("solver config validation") {
  const ProblemSpec spec = sphere_cap_problem(2.0, 0.5, 9);
  SolverConfig bad;
  bad.backtrack = 1.5;
  CHECK_THROWS_AS(newton_solve(spec, bad), std::invalid_argument);
  bad = SolverConfig{};
  bad.max_iters = 0;
  CHECK_THROWS_AS(newton_solve(spec, bad), std::invalid_argument);
}

TEST_CASE("manufacture of the unit paraboloid pins the vertex value") {
  const AnalyticSurface bowl =
      AnalyticSurface::make(SurfaceKind::Paraboloid, 3, {1.0});
  const ProblemSpec spec = manufacture(bowl, 1, 0.3, 17);
  std::vector<double> center{0.0, 0.0, 0.0};
  const double h2 = spec.grid.h() * spec.grid.h();
  CHECK(std::abs(spec.rhs(center) - 1.0 / 3.0) <= 10.0 * h2);
}

TEST_CASE("manufacture pins the sphere cap right-hand side") {
  const AnalyticSurface cap = AnalyticSurface::make(SurfaceKind::Sphere, 3, {3.0});
  const ProblemSpec spec = manufacture(cap, 1, 0.5, 21);
  std::vector<double> x(3);
  const double want = 1.0 / 27.0;
  for (long long node = 0; node < spec.grid.num_nodes(); ++node) {
    spec.grid.coords(node, x);
    const double f = spec.rhs(x);
    CHECK(std::abs(f - want) <= 2e-3 * want);
  }
  // off-grid queries are rejected
  std::vector<double> off{0.1234567, 0.0, 0.0};
  CHECK_THROWS_AS(spec.rhs(off), std::invalid_argument);
}

TEST_CASE("singular denominator at a node reports the node index") {
  // u = x1^2 - x2^2 makes the shape-operator trace vanish exactly at the
  // center, so sigma_1 is a hard zero for the k = 1 denominator.
  const GridLayout grid(3, 0.5, 9);
  Field u = grid.make_field();
  std::vector<double> x(3);
  for (long long node = 0; node < grid.num_nodes(); ++node) {
    grid.coords(node, x);
    u[static_cast<std::size_t>(node)] = x[0] * x[0] - x[1] * x[1];
  }
  const ProblemSpec spec{QuotientOperator{3, 1}, grid,
                         [](std::span<const double>) { return 1.0; },
                         [](std::span<const double>) { return 0.0; },
                         Evaluator{}};
  try {
    residual(u, spec);
    FAIL("expected SingularNodeError");
  } catch (const SingularNodeError& e) {
    // the zero-trace locus of this saddle is |x1| = |x2|
    CHECK(grid.is_interior(e.node()));
    grid.coords(e.node(), x);
    CHECK(std::abs(x[0]) == std::abs(x[1]));
  }
}

TEST_CASE("trace csv format") {
  std::vector<TraceRow> trace{{0, 0.5, 0.0, true}, {1, 0.125, 1.0, true}};
  write_trace_csv(trace, "trace_test.csv");
  std::ifstream in("trace_test.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "iter,residual_max,step_length,admissible");
  std::getline(in, line);
  CHECK(line == "0,0.5,0,1");
  std::remove("trace_test.csv");
}
