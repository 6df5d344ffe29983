#pragma once

#include <Eigen/Core>
#include <vector>

#include "cq/grid.hpp"

namespace cq {

/// Discrete graph u over the cube grid.
struct GraphPatch {
  GridLayout grid;
  Field u;

  GraphPatch(GridLayout g, Field values);
};

/// Differential and geometric fields of a graph patch. Derivatives are
/// second-order centered on interior axis indices and one-sided second order
/// on the outermost ring. Symmetric tensors are packed by sym_index.
struct GeometryFields {
  GridLayout grid;
  std::vector<Field> du;         // dim entries
  std::vector<Field> d2u;        // sym_size(dim) entries
  Field w;                       // sqrt(1 + |Du|^2)
  std::vector<Field> nu;         // dim+1 entries, unit outward normal
  std::vector<Field> shape;      // sym_size(dim), a = gamma D2u gamma / w
  std::vector<Field> curvature;  // dim entries, descending eigenvalues

  explicit GeometryFields(GridLayout g);

  Eigen::VectorXd gradient_at(long long node) const;
  Eigen::MatrixXd hessian_at(long long node) const;
  Eigen::MatrixXd shape_at(long long node) const;
  std::vector<double> curvatures_at(long long node) const;
};

GeometryFields derive_fields(const GraphPatch& patch);

/// Fills du, d2u and w only; nu/shape/curvature stay empty. Cheaper than
/// derive_fields when eigenstructure is not needed.
GeometryFields derive_differentials(const GraphPatch& patch);

/// max over nodes at depth >= 2 and index triples of |h_ijk - h_ikj|, where
/// h_ijk is the covariant derivative of h_ij = u_ij / w under the graph metric
/// g_ij = delta_ij + u_i u_j.
double codazzi_residual(const GraphPatch& patch);

/// max over nodes at depth >= 2 and index tuples of
/// |R_ijkl - (h_ik h_jl - h_il h_jk)| for the curvature tensor of g.
double gauss_residual(const GraphPatch& patch);

/// Metric-level fields shared by the structure-equation checks and the Jacobi
/// diagnostic: packed g, its closed-form inverse, Christoffel symbols from
/// centered differences of g, and the second fundamental form.
struct MetricWork {
  GridLayout grid;
  std::vector<Field> g;            // sym_size
  std::vector<Field> ginv;         // sym_size
  std::vector<Field> h;            // sym_size
  std::vector<Field> christoffel;  // dim * sym_size; [k][sym(i,j)]

  explicit MetricWork(GridLayout layout);
  double gamma_at(long long node, int k, int i, int j) const;
};

MetricWork build_metric_work(const GeometryFields& fields);

/// gamma^{ik} = delta_ik - u_i u_k / (w (1 + w)); symmetric square root of g^{-1}.
Eigen::MatrixXd tilt_projector(const Eigen::VectorXd& du, double w);

}  // namespace cq
