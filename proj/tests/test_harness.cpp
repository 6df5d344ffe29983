#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cq/harness.hpp"
#include "cq/quotient.hpp"
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

ProblemSpec analytic_problem(const AnalyticSurface& surface, double rhs_value,
                             double r, int m) {
  return ProblemSpec{curvature_quotient(surface.dim()),
                     GridLayout(surface.dim(), r, m),
                     [rhs_value](std::span<const double>) { return rhs_value; },
                     [surface](std::span<const double> x) { return surface.value(x); },
                     Evaluator{}};
}

long long center_node(const GridLayout& grid) {
  std::vector<int> idx(static_cast<std::size_t>(grid.dim()), grid.m() / 2);
  return grid.flat(idx);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("curvature report on the sphere cap") {
  const AnalyticSurface cap = AnalyticSurface::make(SurfaceKind::Sphere, 3, {2.0});
  const ProblemSpec spec = analytic_problem(cap, 1.0 / 12.0, 0.5, 17);
  const Field u = sample_on_grid(cap, spec.grid);
  const TheoremDiagnostics diag = curvature_report(u, spec);

  const double h2 = spec.grid.h() * spec.grid.h();
  CHECK(std::abs(diag.sup_lambda1_inner - 0.5) <= 30.0 * h2);
  CHECK(diag.f_min == doctest::Approx(1.0 / 12.0));
  CHECK(diag.f_c2_norm >= diag.f_min);
  CHECK(diag.m_c1_norm > 0.0);

  // the reported location carries the curvature it claims
  double loc_norm2 = 0.0;
  for (double v : diag.location) loc_norm2 += v * v;
  CHECK(loc_norm2 <= 0.25 * 0.25 + 1e-12);
  const GeometryFields fields = derive_fields(GraphPatch(spec.grid, u));
  CHECK(fields.curvature[0][static_cast<std::size_t>(diag.location_node)] ==
        diag.sup_lambda1_inner);

  // inner sup never exceeds the full interior sup
  double sup_all = 0.0;
  for (long long node = 0; node < spec.grid.num_nodes(); ++node)
    if (spec.grid.is_interior(node))
      sup_all = std::max(sup_all, fields.curvature[0][static_cast<std::size_t>(node)]);
  CHECK(diag.sup_lambda1_inner <= sup_all + 1e-15);
}

TEST_CASE("curvature report rejects inadmissible fields") {
  const AnalyticSurface cap = AnalyticSurface::make(SurfaceKind::Sphere, 3, {2.0});
  const ProblemSpec spec = analytic_problem(cap, 1.0 / 12.0, 0.5, 9);
  Field u = spec.grid.make_field();
  std::vector<double> x(3);
  for (long long node = 0; node < spec.grid.num_nodes(); ++node) {
    spec.grid.coords(node, x);
    u[static_cast<std::size_t>(node)] = -(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  }
  CHECK_THROWS_AS(curvature_report(u, spec), std::domain_error);
}

TEST_CASE("aux function at the paraboloid vertex") {
  const double e = std::exp(1.0);
  const AnalyticSurface bowl =
      AnalyticSurface::make(SurfaceKind::Paraboloid, 3, {e});
  const ProblemSpec spec = analytic_problem(bowl, 1.0, 0.5, 17);
  const Field u = sample_on_grid(bowl, spec.grid);
  const long long center = center_node(spec.grid);

  // rho = 1 and u = 0 at the vertex, lambda_1 = e + O(h^2):
  // P = log log lambda_1 - beta u + alpha = alpha + O(h^2)
  const double alpha = 0.7, beta = 2.0;
  const double p = aux_p(u, spec, alpha, beta, center);
  CHECK(std::abs(p - alpha) <= 0.01);

  // parameter degeneracy: alpha = beta = 0 keeps only the log terms
  const double p00 = aux_p(u, spec, 0.0, 0.0, center);
  CHECK(std::abs(p00 - (p - alpha)) <= 1e-12);

  CHECK_THROWS_AS(aux_p(u, spec, -1.0, 1.0, center), std::invalid_argument);

  // node outside the inscribed ball
  std::vector<int> corner_idx{1, 1, 1};
  CHECK_THROWS_AS(aux_p(u, spec, alpha, beta, spec.grid.flat(corner_idx)),
                  std::domain_error);
}

TEST_CASE("aux function requires lambda_1 above one") {
  const AnalyticSurface flat =
      AnalyticSurface::make(SurfaceKind::Paraboloid, 3, {0.5});
  const ProblemSpec spec = analytic_problem(flat, 1.0, 0.5, 9);
  const Field u = sample_on_grid(flat, spec.grid);
  CHECK_THROWS_AS(aux_p(u, spec, 1.0, 1.0, center_node(spec.grid)),
                  std::domain_error);
  CHECK_THROWS_AS(aux_p_max(u, spec, 1.0, 1.0), std::domain_error);
}

TEST_CASE("aux maximum respects radial symmetry") {
  const double e = std::exp(1.0);
  const AnalyticSurface bowl =
      AnalyticSurface::make(SurfaceKind::Paraboloid, 3, {e});
  const ProblemSpec spec = analytic_problem(bowl, 1.0, 0.5, 17);
  const Field u = sample_on_grid(bowl, spec.grid);
  const AuxMax best = aux_p_max(u, spec, 0.7, 2.0);

  // rho and lambda_1 both peak at the origin, so the argmax sits there
  CHECK(best.node == center_node(spec.grid));
  CHECK(best.value == doctest::Approx(aux_p(u, spec, 0.7, 2.0, best.node)));
  CHECK(best.rho2_log_lambda1 == doctest::Approx(1.0).epsilon(0.02));
  CHECK(best.grad_residual >= 0.0);
  CHECK(best.grad_residual <= 0.1);  // symmetric interior maximum
}

TEST_CASE("jacobi diagnostic skips umbilic spectra entirely") {
  const AnalyticSurface cap = AnalyticSurface::make(SurfaceKind::Sphere, 3, {2.0});
  const ProblemSpec spec = analytic_problem(cap, 1.0 / 12.0, 0.5, 13);
  const Field u = sample_on_grid(cap, spec.grid);
  const JacobiDiagnostic diag(u, spec);
  const JacobiScan scan = diag.scan(0.25);
  CHECK(scan.eligible == 0);
  CHECK(diag.slack(center_node(spec.grid), 0.25) == std::nullopt);
}

TEST_CASE("jacobi slack on an anisotropic instance") {
  const AnalyticSurface bowl = AnalyticSurface::make(
      SurfaceKind::Quartic, 3, {3.0, 1.0, 0.4, 1.0, 1.0, 1.0});
  const ProblemSpec spec = manufacture(bowl, 1, 0.8, 13);
  const Field u = sample_on_grid(bowl, spec.grid);

  const JacobiDiagnostic diag(u, spec);
  const double c_default = 1.0 / (2.0 * (3 - 1));
  const JacobiScan scan = diag.scan(c_default);
  REQUIRE(scan.eligible > 0);
  CHECK(std::isfinite(scan.min_slack));

  // dropping the nonnegative gradient-square term can only increase J,
  // at every eligible node
  const JacobiScan scan0 = diag.scan(0.0);
  CHECK(scan0.eligible == scan.eligible);
  CHECK(scan0.min_slack >= scan.min_slack - 1e-12);
  for (long long node = 0; node < spec.grid.num_nodes(); ++node) {
    if (spec.grid.depth(node) < 3) continue;
    const auto with_c = diag.slack(node, c_default);
    const auto without_c = diag.slack(node, 0.0);
    REQUIRE(with_c.has_value() == without_c.has_value());
    if (with_c) CHECK(*without_c >= *with_c - 1e-14);
  }
  const auto at_node = diag.slack(scan.argmin_node, c_default);
  REQUIRE(at_node.has_value());

  // adding a constant to u leaves the diagnostic unchanged
  Field shifted = u;
  for (double& v : shifted) v += 5.0;
  const JacobiDiagnostic diag_shifted(shifted, spec);
  const auto shifted_slack = diag_shifted.slack(scan.argmin_node, c_default);
  REQUIRE(shifted_slack.has_value());
  CHECK(std::abs(*shifted_slack - *at_node) <=
        1e-12 * (1.0 + std::abs(*at_node)));

  // boundary-adjacent nodes are rejected outright
  std::vector<int> shallow{1, 6, 6};
  CHECK_THROWS_AS(diag.slack(spec.grid.flat(shallow), c_default),
                  std::invalid_argument);
}

TEST_CASE("run_sweep produces ordered rows and survives failures") {
  const AnalyticSurface cap = AnalyticSurface::make(SurfaceKind::Sphere, 3, {2.0});
  const AnalyticSurface bowl = AnalyticSurface::make(
      SurfaceKind::Quartic, 3, {2.5, 1.2, 0.9, 1.0, 0.0, 0.0});

  SweepConfig config;
  config.problems.push_back({"cap_a", analytic_problem(cap, 1.0 / 12.0, 0.5, 9)});
  config.problems.push_back({"bowl_b", manufacture(bowl, 1, 0.5, 9)});
  ProblemSpec failing = analytic_problem(cap, 1.0 / 12.0, 0.5, 9);
  failing.initial_guess = [](std::span<const double> x) {
    double norm2 = 0.0;
    for (double v : x) norm2 += v * v;
    return -norm2;
  };
  config.problems.push_back({"broken_c", failing});

  const SweepReport report = run_sweep(config);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[0].problem == "cap_a");
  CHECK(report.rows[1].problem == "bowl_b");
  CHECK(report.rows[2].problem == "broken_c");
  CHECK(report.rows[0].status == "ok");
  CHECK(report.rows[1].status == "ok");
  CHECK(report.rows[2].status.rfind("error:", 0) == 0);
  CHECK(report.rows[0].sup_lambda1_inner ==
        doctest::Approx(0.5).epsilon(0.05));

  write_sweep_csv(report, "sweep_test.csv");
  const std::string text = slurp("sweep_test.csv");
  std::remove("sweep_test.csv");
  CHECK(text.rfind("problem,status,n,k,r,m,iters,residual_max,f_min,", 0) == 0);
  CHECK(text.find("\"cap_a\"") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("sweep output is deterministic across runs and worker counts") {
  const AnalyticSurface bowl = AnalyticSurface::make(
      SurfaceKind::Quartic, 3, {2.5, 1.2, 0.9, 1.0, 0.0, 0.0});
  const AnalyticSurface cap = AnalyticSurface::make(SurfaceKind::Sphere, 3, {2.0});
  SweepConfig config;
  config.problems.push_back({"bowl", manufacture(bowl, 1, 0.5, 9)});
  config.problems.push_back({"cap", analytic_problem(cap, 1.0 / 12.0, 0.5, 9)});
  config.problems.push_back({"bowl2", manufacture(bowl, 1, 0.5, 11)});

  const char* saved = std::getenv("CQ_THREADS");
  const std::string saved_value = saved ? saved : "";
  setenv("CQ_THREADS", "1", 1);
  write_sweep_csv(run_sweep(config), "sweep_det_a.csv");
  setenv("CQ_THREADS", "3", 1);
  write_sweep_csv(run_sweep(config), "sweep_det_b.csv");
  if (saved)
    setenv("CQ_THREADS", saved_value.c_str(), 1);
  else
    unsetenv("CQ_THREADS");

  CHECK(slurp("sweep_det_a.csv") == slurp("sweep_det_b.csv"));
  std::remove("sweep_det_a.csv");
  std::remove("sweep_det_b.csv");
}

TEST_CASE("empty sweep writes the header only") {
  const SweepReport report = run_sweep(SweepConfig{});
  CHECK(report.rows.empty());
  write_sweep_csv(report, "sweep_empty.csv");
  const std::string text = slurp("sweep_empty.csv");
  std::remove("sweep_empty.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
}
