#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

#include "cq/geometry.hpp"
#include "cq/grid.hpp"

namespace cq {

enum class SurfaceKind {
  Sphere,      // params [R]; u = R - sqrt(R^2 - |x|^2)
  Paraboloid,  // params [c]; u = c |x|^2 / 2
  Quadratic,   // params: dim diagonal entries or dim(dim+1)/2 upper triangle; u = x^T A x / 2
  Radial,      // params [a, b]; u = a (cosh(b |x|) - 1) / b^2
  Quartic,     // params: dim quadratic + dim quartic coefficients; u = sum a_i x_i^2/2 + q_i x_i^4/12
};

SurfaceKind parse_surface_kind(const std::string& name);
std::string surface_kind_name(SurfaceKind kind);

/// Strictly convex analytic graph with closed-form derivatives. The exact
/// principal curvatures run the continuous shape-operator formulas on the
/// closed-form gradient and Hessian. An optional shift evaluates the profile
/// at x - shift.
class AnalyticSurface {
 public:
  static AnalyticSurface make(SurfaceKind kind, int dim,
                              std::vector<double> params,
                              std::vector<double> shift = {});

  int dim() const noexcept { return dim_; }
  SurfaceKind kind() const noexcept { return kind_; }
  const std::vector<double>& params() const noexcept { return params_; }

  double value(std::span<const double> x) const;
  Eigen::VectorXd gradient(std::span<const double> x) const;
  Eigen::MatrixXd hessian(std::span<const double> x) const;

  /// Principal curvatures at x, descending.
  std::vector<double> curvatures(std::span<const double> x) const;

  /// Samples u on the grid. Throws std::invalid_argument when the surface is
  /// not graph-representable or not strictly convex over the cube.
  GraphPatch sample(double r, int m) const;

 private:
  AnalyticSurface(SurfaceKind kind, int dim, std::vector<double> params,
                  std::vector<double> shift);

  SurfaceKind kind_;
  int dim_;
  std::vector<double> params_;
  std::vector<double> shift_;
  Eigen::MatrixXd quad_;  // Quadratic kind only
};

/// Patch plus the exact curvature oracle sampled at every node (descending,
/// one field per principal curvature).
struct SampledSurface {
  GraphPatch patch;
  std::vector<Field> oracle_curvatures;
};

SampledSurface analytic_surface(SurfaceKind kind, int dim,
                                std::vector<double> params, double r, int m,
                                std::vector<double> shift = {});

}  // namespace cq
