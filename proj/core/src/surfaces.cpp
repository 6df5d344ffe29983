#include "cq/surfaces.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "cq/quotient.hpp"

namespace cq {

SurfaceKind parse_surface_kind(const std::string& name) {
  if (name == "sphere") return SurfaceKind::Sphere;
  if (name == "paraboloid") return SurfaceKind::Paraboloid;
  if (name == "quadratic") return SurfaceKind::Quadratic;
  if (name == "radial") return SurfaceKind::Radial;
  if (name == "quartic") return SurfaceKind::Quartic;
  throw std::invalid_argument("unknown surface kind: " + name);
}

std::string surface_kind_name(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::Sphere: return "sphere";
    case SurfaceKind::Paraboloid: return "paraboloid";
    case SurfaceKind::Quadratic: return "quadratic";
    case SurfaceKind::Radial: return "radial";
    case SurfaceKind::Quartic: return "quartic";
  }
  return "unknown";
}

namespace {

// sinh(y)/y with a series branch near zero
double sinhc(double y) {
  if (std::abs(y) < 1e-4) {
    const double y2 = y * y;
    return 1.0 + y2 / 6.0 + y2 * y2 / 120.0;
  }
  return std::sinh(y) / y;
}

}  // namespace

AnalyticSurface::AnalyticSurface(SurfaceKind kind, int dim,
                                 std::vector<double> params,
                                 std::vector<double> shift)
    : kind_(kind), dim_(dim), params_(std::move(params)), shift_(std::move(shift)) {}

AnalyticSurface AnalyticSurface::make(SurfaceKind kind, int dim,
                                      std::vector<double> params,
                                      std::vector<double> shift) {
  if (dim < 2) throw std::invalid_argument("AnalyticSurface: dim >= 2 required");
  if (!shift.empty() && static_cast<int>(shift.size()) != dim)
    throw std::invalid_argument("AnalyticSurface: shift dimension mismatch");

  switch (kind) {
    case SurfaceKind::Sphere:
      if (params.size() != 1 || params[0] <= 0.0)
        throw std::invalid_argument("sphere: params must be [R] with R > 0");
      break;
    case SurfaceKind::Paraboloid:
      if (params.size() != 1 || params[0] <= 0.0)
        throw std::invalid_argument("paraboloid: params must be [c] with c > 0");
      break;
    case SurfaceKind::Radial:
      if (params.size() != 2 || params[0] <= 0.0 || params[1] <= 0.0)
        throw std::invalid_argument("radial: params must be [a, b], both > 0");
      break;
    case SurfaceKind::Quartic: {
      if (params.size() != 2 * static_cast<std::size_t>(dim))
        throw std::invalid_argument(
            "quartic: params must hold dim quadratic + dim quartic coefficients");
      for (int i = 0; i < dim; ++i) {
        if (params[static_cast<std::size_t>(i)] <= 0.0)
          throw std::invalid_argument("quartic: quadratic coefficients must be > 0");
        if (params[static_cast<std::size_t>(dim + i)] < 0.0)
          throw std::invalid_argument("quartic: quartic coefficients must be >= 0");
      }
      break;
    }
    case SurfaceKind::Quadratic:
      break;  // handled below, needs the assembled matrix
  }

  AnalyticSurface surface(kind, dim, std::move(params), std::move(shift));
  if (kind == SurfaceKind::Quadratic) {
    const auto& p = surface.params_;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    if (p.size() == static_cast<std::size_t>(dim)) {
      for (int i = 0; i < dim; ++i) a(i, i) = p[static_cast<std::size_t>(i)];
    } else if (p.size() == static_cast<std::size_t>(dim * (dim + 1) / 2)) {
      std::size_t t = 0;
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
          a(i, j) = p[t];
          a(j, i) = p[t];
          ++t;
        }
    } else {
      throw std::invalid_argument(
          "quadratic: params must hold dim diagonal or dim(dim+1)/2 upper-triangle entries");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    if (eig.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("quadratic: matrix must be positive definite");
    surface.quad_ = std::move(a);
  }
  return surface;
}

double AnalyticSurface::value(std::span<const double> x) const {
  Eigen::VectorXd y(dim_);
  for (int i = 0; i < dim_; ++i)
    y[i] = x[static_cast<std::size_t>(i)] -
           (shift_.empty() ? 0.0 : shift_[static_cast<std::size_t>(i)]);
  const double s2 = y.squaredNorm();
  switch (kind_) {
    case SurfaceKind::Sphere: {
      const double radius = params_[0];
      const double arg = radius * radius - s2;
      if (arg <= 0.0)
        throw std::domain_error("sphere: point outside the graph domain");
      return radius - std::sqrt(arg);
    }
    case SurfaceKind::Paraboloid:
      return 0.5 * params_[0] * s2;
    case SurfaceKind::Quadratic:
      return 0.5 * y.dot(quad_ * y);
    case SurfaceKind::Radial: {
      const double a = params_[0], b = params_[1];
      const double s = std::sqrt(s2);
      return a * (std::cosh(b * s) - 1.0) / (b * b);
    }
    case SurfaceKind::Quartic: {
      double total = 0.0;
      for (int i = 0; i < dim_; ++i)
        total += 0.5 * params_[static_cast<std::size_t>(i)] * y[i] * y[i] +
                 params_[static_cast<std::size_t>(dim_ + i)] * y[i] * y[i] * y[i] * y[i] / 12.0;
      return total;
    }
  }
  throw std::logic_error("unreachable surface kind");
}

Eigen::VectorXd AnalyticSurface::gradient(std::span<const double> x) const {
  Eigen::VectorXd y(dim_);
  for (int i = 0; i < dim_; ++i)
    y[i] = x[static_cast<std::size_t>(i)] -
           (shift_.empty() ? 0.0 : shift_[static_cast<std::size_t>(i)]);
  const double s2 = y.squaredNorm();
  switch (kind_) {
    case SurfaceKind::Sphere: {
      const double radius = params_[0];
      const double arg = radius * radius - s2;
      if (arg <= 0.0)
        throw std::domain_error("sphere: point outside the graph domain");
      return y / std::sqrt(arg);
    }
    case SurfaceKind::Paraboloid:
      return params_[0] * y;
    case SurfaceKind::Quadratic:
      return quad_ * y;
    case SurfaceKind::Radial: {
      const double a = params_[0], b = params_[1];
      const double s = std::sqrt(s2);
      // phi'(s)/s = a sinhc(b s)
      return a * sinhc(b * s) * y;
    }
    case SurfaceKind::Quartic: {
      Eigen::VectorXd grad(dim_);
      for (int i = 0; i < dim_; ++i)
        grad[i] = params_[static_cast<std::size_t>(i)] * y[i] +
                  params_[static_cast<std::size_t>(dim_ + i)] * y[i] * y[i] * y[i] / 3.0;
      return grad;
    }
  }
  throw std::logic_error("unreachable surface kind");
}

Eigen::MatrixXd AnalyticSurface::hessian(std::span<const double> x) const {
  Eigen::VectorXd y(dim_);
  for (int i = 0; i < dim_; ++i)
    y[i] = x[static_cast<std::size_t>(i)] -
           (shift_.empty() ? 0.0 : shift_[static_cast<std::size_t>(i)]);
  const double s2 = y.squaredNorm();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim_, dim_);
  switch (kind_) {
    case SurfaceKind::Sphere: {
      const double radius = params_[0];
      const double arg = radius * radius - s2;
      if (arg <= 0.0)
        throw std::domain_error("sphere: point outside the graph domain");
      return id / std::sqrt(arg) + y * y.transpose() / std::pow(arg, 1.5);
    }
    case SurfaceKind::Paraboloid:
      return params_[0] * id;
    case SurfaceKind::Quadratic:
      return quad_;
    case SurfaceKind::Radial: {
      const double a = params_[0], b = params_[1];
      const double s = std::sqrt(s2);
      const double tangential = a * sinhc(b * s);
      if (s < 1e-12) return tangential * id;
      const Eigen::VectorXd dir = y / s;
      const double radial = a * std::cosh(b * s);
      return tangential * (id - dir * dir.transpose()) +
             radial * dir * dir.transpose();
    }
    case SurfaceKind::Quartic: {
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(dim_, dim_);
      for (int i = 0; i < dim_; ++i)
        hess(i, i) = params_[static_cast<std::size_t>(i)] +
                     params_[static_cast<std::size_t>(dim_ + i)] * y[i] * y[i];
      return hess;
    }
  }
  throw std::logic_error("unreachable surface kind");
}

std::vector<double> AnalyticSurface::curvatures(std::span<const double> x) const {
  const Eigen::VectorXd p = gradient(x);
  const Eigen::MatrixXd s = hessian(x);
  const double w = std::sqrt(1.0 + p.squaredNorm());
  const Eigen::MatrixXd gamma = tilt_projector(p, w);
  const Eigen::MatrixXd shape = gamma * s * gamma / w;
  const SymmetricEigen eig =
      symmetric_eigen_descending(0.5 * (shape + shape.transpose()));
  return std::vector<double>(eig.values.data(), eig.values.data() + dim_);
}

GraphPatch AnalyticSurface::sample(double r, int m) const {
  const GridLayout grid(dim_, r, m);
  if (kind_ == SurfaceKind::Sphere) {
    // The cube corner must stay inside the sphere's graph domain.
    double corner2 = 0.0;
    for (int i = 0; i < dim_; ++i) {
      const double s = shift_.empty() ? 0.0 : shift_[static_cast<std::size_t>(i)];
      corner2 += std::pow(r + std::abs(s), 2);
    }
    if (corner2 >= params_[0] * params_[0])
      throw std::invalid_argument("sphere: cube [-r,r]^n exceeds the graph domain");
  }
  Field u = grid.make_field();
  std::vector<double> x(static_cast<std::size_t>(dim_));
  for (long long node = 0; node < grid.num_nodes(); ++node) {
    grid.coords(node, x);
    u[static_cast<std::size_t>(node)] = value(x);
  }
  return GraphPatch(grid, std::move(u));
}

SampledSurface analytic_surface(SurfaceKind kind, int dim,
                                std::vector<double> params, double r, int m,
                                std::vector<double> shift) {
  const AnalyticSurface surface =
      AnalyticSurface::make(kind, dim, std::move(params), std::move(shift));
  GraphPatch patch = surface.sample(r, m);
  const GridLayout& grid = patch.grid;

  std::vector<Field> oracle(static_cast<std::size_t>(dim), grid.make_field());
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (long long node = 0; node < grid.num_nodes(); ++node) {
    grid.coords(node, x);
    const auto curv = surface.curvatures(x);
    for (int a = 0; a < dim; ++a)
      oracle[static_cast<std::size_t>(a)][static_cast<std::size_t>(node)] =
          curv[static_cast<std::size_t>(a)];
  }
  return {std::move(patch), std::move(oracle)};
}

}  // namespace cq
