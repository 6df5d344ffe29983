#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <iostream>
#include <string>
#include <vector>

#include "cq/config.hpp"
#include "cq/geometry.hpp"
#include "cq/harness.hpp"
#include "cq/ineq_lab.hpp"
#include "cq/io.hpp"
#include "cq/patch_io.hpp"
#include "cq/quotient.hpp"
#include "cq/setup.hpp"
#include "cq/solver.hpp"
#include "cq/surfaces.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;  // violations or non-convergence
constexpr int kExitUsage = 2;

std::vector<int> parse_dim_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {std::stoi(text)};
  const int lo = std::stoi(text.substr(0, dots));
  const int hi = std::stoi(text.substr(dots + 2));
  if (hi < lo) throw std::invalid_argument("--n range is empty: " + text);
  std::vector<int> out;
  for (int n = lo; n <= hi; ++n) out.push_back(n);
  return out;
}

std::vector<double> parse_csv_floats(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(std::stod(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

int run_verify(const std::string& n_spec, long long samples, std::uint64_t seed,
               const std::string& dist, double tol, const std::string& out) {
  cq::CampaignConfig config;
  config.dims = parse_dim_range(n_spec);
  config.samples = samples;
  config.seed = seed;
  config.dist = cq::parse_distribution(dist);
  config.tolerance = tol;

  const cq::CampaignReport report = cq::run_campaign(config);
  cq::write_campaign_csv(report, out);

  const long long violations = report.total_violations();
  std::cout << "campaign: " << config.dims.size() << " dimension(s), "
            << samples << " samples each, " << report.rows.size()
            << " rows -> " << out << "\n";
  for (const auto& row : report.rows) {
    if (row.violations == 0) continue;
    std::cout << "violation: lemma " << row.lemma << " n=" << row.n
              << " count=" << row.violations
              << " min_gap=" << cq::format_double(row.min_gap)
              << " argmin=" << cq::format_json_array(row.argmin) << "\n";
  }
  std::cout << (violations == 0 ? "no violations" :
                "total violations: " + std::to_string(violations))
            << "\n";
  return violations == 0 ? kExitOk : kExitFailure;
}

int run_solve(const std::string& config_path, const std::string& out_prefix) {
  std::optional<cq::SolveJob> parsed;
  try {
    parsed = cq::solve_job_from_config(cq::parse_config_file(config_path));
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  const cq::SolveJob& job = *parsed;

  const cq::SolveResult result = cq::newton_solve(job.spec, job.solver);
  cq::write_trace_csv(result.trace, out_prefix + "_trace.csv");
  cq::write_patch_csv(cq::GraphPatch(job.spec.grid, result.state.u),
                      out_prefix + ".csv");
  cq::write_patch_json(job.meta, out_prefix + ".json");

  std::cout << "problem " << job.name << ": " << cq::solve_status_name(result.status)
            << " after " << result.state.step << " step(s), residual "
            << cq::format_double(result.state.residual_norm) << "\n";
  if (!result.converged()) return kExitFailure;

  const cq::TheoremDiagnostics diag = cq::curvature_report(result.state.u, job.spec);
  std::cout << "sup lambda_1 over |x| <= r/2: "
            << cq::format_double(diag.sup_lambda1_inner) << " at "
            << cq::format_json_array(diag.location) << "\n";
  return kExitOk;
}

int run_sweep_cmd(const std::string& config_path, const std::string& out) {
  std::optional<cq::SweepConfig> config;
  try {
    config = cq::sweep_from_config(cq::parse_config_file(config_path));
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  const cq::SweepReport report = cq::run_sweep(*config);
  cq::write_sweep_csv(report, out);
  long long failures = 0;
  for (const auto& row : report.rows) {
    std::cout << row.problem << ": " << row.status;
    if (row.solved)
      std::cout << " sup_lambda1=" << cq::format_double(row.sup_lambda1_inner);
    std::cout << "\n";
    if (row.status != "ok") ++failures;
  }
  std::cout << report.rows.size() << " problem(s) -> " << out << "\n";
  return failures == 0 ? kExitOk : kExitFailure;
}

int run_surface(const std::string& kind, const std::string& params_text, int n,
                double r, int m, bool report) {
  const cq::SurfaceKind surface_kind = cq::parse_surface_kind(kind);
  const std::vector<double> params = parse_csv_floats(params_text);
  const cq::SampledSurface sampled =
      cq::analytic_surface(surface_kind, n, params, r, m);

  if (!report) {
    std::cout << cq::patch_csv_string(sampled.patch);
    return kExitOk;
  }

  const cq::GeometryFields fields = cq::derive_fields(sampled.patch);
  const cq::GridLayout& grid = sampled.patch.grid;
  double cmin = 0.0, cmax = 0.0, worst = 0.0, fmin = 0.0, fmax = 0.0;
  bool first = true;
  for (long long node = 0; node < grid.num_nodes(); ++node) {
    if (grid.depth(node) < 2) continue;
    const auto curv = fields.curvatures_at(node);
    const double f = cq::f_value(cq::curvature_quotient(n), cq::Spectrum(curv));
    for (int a = 0; a < n; ++a) {
      const double got = curv[static_cast<std::size_t>(a)];
      const double want =
          sampled.oracle_curvatures[static_cast<std::size_t>(a)]
                                   [static_cast<std::size_t>(node)];
      worst = std::max(worst, std::abs(got - want));
      if (first && a == 0) {
        cmin = cmax = got;
        fmin = fmax = f;
        first = false;
      }
      cmin = std::min(cmin, got);
      cmax = std::max(cmax, got);
    }
    fmin = std::min(fmin, f);
    fmax = std::max(fmax, f);
  }
  std::cout << "surface " << kind << " n=" << n << " r=" << cq::format_double(r)
            << " m=" << m << " params=" << cq::format_json_array(params) << "\n"
            << "grid spacing h = " << cq::format_double(grid.h()) << "\n"
            << "discrete principal curvatures in ["
            << cq::format_double(cmin) << ", " << cq::format_double(cmax) << "]\n"
            << "max |discrete - oracle| curvature = " << cq::format_double(worst)
            << "\n"
            << "operator value F in [" << cq::format_double(fmin) << ", "
            << cq::format_double(fmax) << "]\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvature quotient operator toolkit"};
  app.require_subcommand(1);

  std::string n_spec = "3..6";
  long long samples = 100000;
  std::uint64_t seed = 42;
  std::string dist = "aniso";
  double tol = 1e-9;
  std::string verify_out;
  CLI::App* verify = app.add_subcommand(
      "verify", "sample the operator inequalities and write a campaign CSV");
  verify->add_option("--n", n_spec, "dimension or inclusive range, e.g. 4 or 3..6");
  verify->add_option("--samples", samples, "samples per dimension");
  verify->add_option("--seed", seed, "campaign seed");
  verify->add_option("--dist", dist, "sampling distribution")
      ->check(CLI::IsMember({"loguniform", "uniform", "aniso"}));
  verify->add_option("--tol", tol, "violation tolerance (scaled)");
  verify->add_option("--out", verify_out, "output CSV path")->required();

  std::string solve_config, out_prefix;
  CLI::App* solve = app.add_subcommand(
      "solve", "solve a curvature-equation instance from a config file");
  solve->add_option("--config", solve_config, "problem config file")->required();
  solve->add_option("--out-prefix", out_prefix,
                    "prefix for .csv / .json / _trace.csv outputs")
      ->required();

  std::string sweep_config, sweep_out;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "solve a family of problems and write diagnostics per problem");
  sweep->add_option("--config", sweep_config, "sweep config file")->required();
  sweep->add_option("--out", sweep_out, "output CSV path")->required();

  std::string kind, params_text = "";
  int n = 3, m = 17;
  double r = 0.5;
  bool report = false;
  CLI::App* surface = app.add_subcommand(
      "surface", "sample an analytic surface; prints the patch CSV by default");
  surface->add_option("--kind", kind, "surface family")
      ->check(CLI::IsMember({"sphere", "paraboloid", "quadratic", "radial"}))
      ->required();
  surface->add_option("--params", params_text, "comma separated parameters")
      ->required();
  surface->add_option("--n", n, "base dimension");
  surface->add_option("--r", r, "cube half width");
  surface->add_option("--m", m, "nodes per axis (odd)");
  surface->add_flag("--report", report, "print a curvature report instead of the patch");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (verify->parsed())
      return run_verify(n_spec, samples, seed, dist, tol, verify_out);
    if (solve->parsed()) return run_solve(solve_config, out_prefix);
    if (sweep->parsed()) return run_sweep_cmd(sweep_config, sweep_out);
    if (surface->parsed())
      return run_surface(kind, params_text, n, r, m, report);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
