#pragma once

#include <Eigen/Core>

#include "cq/spectrum.hpp"

namespace cq {

/// Descriptor of the quotient operator F = sigma_n / sigma_k in dimension n.
/// The curvature case is k = n-2; general 0 <= k < n is supported (k = 0
/// gives the Monge-Ampere operator sigma_n).
struct QuotientOperator {
  int n = 0;
  int k = 0;
};

/// F = sigma_n / sigma_{n-2} in dimension n.
inline QuotientOperator curvature_quotient(int n) { return {n, n - 2}; }

/// Value, gradient and second derivatives of F in eigenvalue coordinates at a
/// point where the argument matrix is diagonal.
///
///  grad[p]        = F^{pp}
///  hess_diag(p,r) = F^{pp,rr} (including p == r)
///  hess_off(p,q)  = F^{pq,qp} for p != q; the diagonal is zero
///
/// All entries come from minor formulas (sigma evaluated on deleted spectra),
/// so the jet is well defined at repeated eigenvalues.
struct OperatorJet {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess_diag;
  Eigen::MatrixXd hess_off;
};

/// sigma_n(lam) / sigma_k(lam). Throws SingularDenominatorError when
/// sigma_k(lam) vanishes.
double f_value(const QuotientOperator& op, const Spectrum& lam);

/// Full first/second derivative jet of F at lam.
OperatorJet jet(const QuotientOperator& op, const Spectrum& lam);

/// Closed form F^{ii} = F^2 / lam_i^2 * sum_{j != i} 1/lam_j, valid for
/// k = n-2 on the open positive cone. Must agree with jet().grad.
Eigen::VectorXd grad_alt(const QuotientOperator& op, const OrderedSpectrum& lam);

/// | sigma_{n-k}/sigma_{n-l}(lam) - (sigma_k/sigma_l)(1/lam) | for
/// 1 <= l < k <= n and strictly positive lam.
double duality_gap(int n, int k, int l, const Spectrum& lam);

/// | -F^{pq,qp} - (F^{pp} - F^{qq}) / (lam_q - lam_p) |. Requires
/// |lam_p - lam_q| > separation; the identity degenerates numerically below it.
double divided_difference_gap(const QuotientOperator& op, const Spectrum& lam,
                              int p, int q, double separation = 1e-3);

/// The individual terms of the concavity inequality evaluated at (lam, xi):
///   quad   = sum_{i,j} F^{ii,jj} xi_i xi_j
///   square = (2/F) (sum_i F^{ii} xi_i)^2
///   ratio  = F^{11} xi_1^2 / lam_1
struct ConcavityTerms {
  double quad = 0.0;
  double square = 0.0;
  double ratio = 0.0;

  /// G = -quad - ratio + square - ratio / (2(n-1)); the lemma asserts G >= 0.
  double gap(int n) const;
  /// 1 + max(|quad|, |square|, |ratio|), the tolerance scale.
  double scale() const;
};

ConcavityTerms concavity_terms(const QuotientOperator& op,
                               const OrderedSpectrum& lam,
                               std::span<const double> xi);

/// Concavity gap G for k = n-2, n >= 3, lam descending and strictly positive.
double concavity_gap(const QuotientOperator& op, const OrderedSpectrum& lam,
                     std::span<const double> xi);

/// F evaluated on the spectrum of a symmetric matrix, optionally with the
/// first Frechet derivative dF/dW = sum_p grad[p] v_p v_p^T.
struct MatrixJet {
  double value = 0.0;
  Eigen::MatrixXd derivative;  // empty unless requested
};

MatrixJet matrix_jet(const QuotientOperator& op, const Eigen::MatrixXd& w,
                     bool need_derivative);

/// Eigenvalues of a symmetric matrix sorted descending with matching
/// orthonormal eigenvectors in the columns of `vectors`.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

SymmetricEigen symmetric_eigen_descending(const Eigen::MatrixXd& w);

/// matrix_jet on an already computed eigensystem.
MatrixJet matrix_jet(const QuotientOperator& op, const SymmetricEigen& eig,
                     bool need_derivative);

}  // namespace cq
