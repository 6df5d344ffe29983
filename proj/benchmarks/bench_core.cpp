#include <benchmark/benchmark.h>

#include "cq/geometry.hpp"
#include "cq/quotient.hpp"
#include "cq/sampler.hpp"
#include "cq/solver.hpp"
#include "cq/surfaces.hpp"
#include "cq/symfun.hpp"

namespace {

using namespace cq;

void BM_SigmaAll(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ConeSampler sampler(n, ConeDistribution::LogUniform, 1);
  const OrderedSpectrum lam = sampler.next();
  for (auto _ : state)
    benchmark::DoNotOptimize(sigma_all(lam.spectrum()));
}
BENCHMARK(BM_SigmaAll)->Arg(3)->Arg(6)->Arg(8);

void BM_Jet(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ConeSampler sampler(n, ConeDistribution::LogUniform, 2);
  const OrderedSpectrum lam = sampler.next();
  const QuotientOperator op = curvature_quotient(n);
  for (auto _ : state)
    benchmark::DoNotOptimize(jet(op, lam.spectrum()));
}
BENCHMARK(BM_Jet)->Arg(3)->Arg(6);

void BM_ConcavityGap(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ConeSampler sampler(n, ConeDistribution::Anisotropic, 3);
  const OrderedSpectrum lam = sampler.next();
  const std::vector<double> xi = sampler.next_direction();
  const QuotientOperator op = curvature_quotient(n);
  for (auto _ : state)
    benchmark::DoNotOptimize(concavity_gap(op, lam, xi));
}
BENCHMARK(BM_ConcavityGap)->Arg(3)->Arg(6);

void BM_DeriveFields(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const AnalyticSurface cap = AnalyticSurface::make(SurfaceKind::Sphere, 3, {2.0});
  const GraphPatch patch = cap.sample(0.5, m);
  for (auto _ : state)
    benchmark::DoNotOptimize(derive_fields(patch));
}
BENCHMARK(BM_DeriveFields)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);

void BM_Residual(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const AnalyticSurface bowl = AnalyticSurface::make(
      SurfaceKind::Quartic, 3, {1.0, 1.0, 1.0, 1.0, 0.0, 0.0});
  const ProblemSpec spec = manufacture(bowl, 1, 1.0, m);
  Field u = spec.grid.make_field();
  std::vector<double> x(3);
  for (long long node = 0; node < spec.grid.num_nodes(); ++node) {
    spec.grid.coords(node, x);
    u[static_cast<std::size_t>(node)] = bowl.value(x);
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(residual(u, spec));
}
BENCHMARK(BM_Residual)->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond);

void BM_NewtonSolve(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const AnalyticSurface cap = AnalyticSurface::make(SurfaceKind::Sphere, 3, {2.0});
  const ProblemSpec spec{
      curvature_quotient(3), GridLayout(3, 0.5, m),
      [](std::span<const double>) { return 1.0 / 12.0; },
      [cap](std::span<const double> x) { return cap.value(x); },
      Evaluator{}};
  for (auto _ : state)
    benchmark::DoNotOptimize(newton_solve(spec, SolverConfig{}));
}
BENCHMARK(BM_NewtonSolve)->Arg(9)->Arg(17)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
