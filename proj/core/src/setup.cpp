#include "cq/setup.hpp"

#include <stdexcept>

#include "cq/surfaces.hpp"

namespace cq {

namespace {

std::vector<double> optional_shift(const ConfigSection& section,
                                   const std::string& key) {
  if (auto values = section.get_double_array(key)) return *values;
  return {};
}

AnalyticSurface surface_from_keys(const ConfigSection& section, int dim,
                                  const std::string& kind_key,
                                  const std::string& params_key,
                                  const std::string& shift_key) {
  const std::string kind = section.require(kind_key).as_string();
  const auto params = section.get_double_array(params_key);
  if (!params)
    throw std::runtime_error("config section [" + section.name +
                             "] is missing key '" + params_key + "'");
  return AnalyticSurface::make(parse_surface_kind(kind), dim, *params,
                               optional_shift(section, shift_key));
}

}  // namespace

SolverConfig solver_from_section(const ConfigSection* section) {
  SolverConfig config;
  if (!section) return config;
  config.tol_residual = section->get_double("tol_residual", config.tol_residual);
  config.max_iters =
      static_cast<int>(section->get_integer("max_iters", config.max_iters));
  config.backtrack = section->get_double("backtrack", config.backtrack);
  config.min_step = section->get_double("min_step", config.min_step);
  config.lin_tol = section->get_double("lin_tol", config.lin_tol);
  return config;
}

SolveJob problem_from_section(const ConfigSection& section) {
  const int n = static_cast<int>(section.require("n").as_integer());
  const int k = static_cast<int>(section.get_integer("k", n - 2));
  const double r = section.require("r").as_double();
  const int m = static_cast<int>(section.require("m").as_integer());
  const std::string kind = section.get_string("kind", "manufactured");

  const AnalyticSurface surface =
      surface_from_keys(section, n, "surface", "surface_params", "shift");

  auto build_spec = [&]() -> ProblemSpec {
    if (kind == "manufactured") return manufacture(surface, k, r, m);
    if (kind == "analytic") {
      const double rhs_value = section.require("rhs_constant").as_double();
      if (!(rhs_value > 0.0))
        throw std::runtime_error("rhs_constant must be strictly positive");
      return ProblemSpec{
          QuotientOperator{n, k}, GridLayout(n, r, m),
          [rhs_value](std::span<const double>) { return rhs_value; },
          [surface](std::span<const double> x) { return surface.value(x); },
          Evaluator{}};
    }
    throw std::runtime_error("unknown problem kind '" + kind +
                             "' (expected \"manufactured\" or \"analytic\")");
  };

  SolveJob job{section.get_string("name", surface_kind_name(surface.kind())),
               build_spec(), SolverConfig{},
               PatchMeta{n, r, m, surface_kind_name(surface.kind()),
                         surface.params()}};

  const std::string guess = section.get_string("initial_guess", "auto");
  if (guess == "surface") {
    const AnalyticSurface guess_surface = surface_from_keys(
        section, n, "guess_surface", "guess_params", "guess_shift");
    job.spec.initial_guess = [guess_surface](std::span<const double> x) {
      return guess_surface.value(x);
    };
  } else if (guess != "auto") {
    throw std::runtime_error("unknown initial_guess '" + guess +
                             "' (expected \"auto\" or \"surface\")");
  }
  return job;
}

SolveJob solve_job_from_config(const ConfigFile& config) {
  const auto problems = config.find_all("problem");
  if (problems.size() != 1)
    throw std::runtime_error("solve config requires exactly one [problem] section");
  SolveJob job = problem_from_section(*problems.front());
  job.solver = solver_from_section(config.find("solver"));
  return job;
}

SweepConfig sweep_from_config(const ConfigFile& config) {
  SweepConfig sweep;
  sweep.solver = solver_from_section(config.find("solver"));
  if (const ConfigSection* section = config.find("sweep")) {
    sweep.alpha = section->get_double("alpha", sweep.alpha);
    sweep.beta = section->get_double("beta", sweep.beta);
    if (const ConfigValue* c = section->find("c_candidate"))
      sweep.c_candidate = c->as_double();
  }
  const auto problems = config.find_all("problem");
  if (problems.empty() && !config.find("sweep"))
    throw std::runtime_error("sweep config has no [sweep] or [problem] sections");
  int index = 0;
  for (const ConfigSection* section : problems) {
    SolveJob job = problem_from_section(*section);
    std::string name = section->get_string("name", "");
    if (name.empty()) name = "problem_" + std::to_string(index);
    sweep.problems.push_back(SweepProblem{std::move(name), std::move(job.spec)});
    ++index;
  }
  return sweep;
}

}  // namespace cq
