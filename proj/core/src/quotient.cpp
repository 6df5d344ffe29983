#include "cq/quotient.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "cq/errors.hpp"
#include "cq/symfun.hpp"

namespace cq {

namespace {

void check_operator(const QuotientOperator& op) {
  if (op.n < 2) throw std::invalid_argument("QuotientOperator: n >= 2 required");
  if (op.k < 0 || op.k >= op.n)
    throw std::invalid_argument("QuotientOperator: 0 <= k < n required");
}

void check_dimension(const QuotientOperator& op, const Spectrum& lam) {
  if (lam.n() != op.n)
    throw std::invalid_argument("spectrum dimension does not match operator");
}

// sigma_j(lam | p) for all p as rows of a table indexed [p][j].
std::vector<std::vector<double>> minor_tables(const Spectrum& lam) {
  const int n = lam.n();
  std::vector<std::vector<double>> tables(static_cast<std::size_t>(n));
  std::vector<double> rest(static_cast<std::size_t>(n - 1));
  for (int p = 0; p < n; ++p) {
    int t = 0;
    for (int q = 0; q < n; ++q)
      if (q != p) rest[static_cast<std::size_t>(t++)] = lam[q];
    tables[static_cast<std::size_t>(p)] = detail::elem_sym_coeffs(rest);
  }
  return tables;
}

}  // namespace

double f_value(const QuotientOperator& op, const Spectrum& lam) {
  check_operator(op);
  check_dimension(op, lam);
  const auto coeffs = sigma_all(lam);
  const double sk = coeffs[static_cast<std::size_t>(op.k)];
  if (sk == 0.0)
    throw SingularDenominatorError("sigma_k vanishes at evaluation point");
  return coeffs[static_cast<std::size_t>(op.n)] / sk;
}

OperatorJet jet(const QuotientOperator& op, const Spectrum& lam) {
  check_operator(op);
  check_dimension(op, lam);
  const int n = op.n;
  const int k = op.k;
  const auto coeffs = sigma_all(lam);
  const double sk = coeffs[static_cast<std::size_t>(k)];
  if (sk == 0.0)
    throw SingularDenominatorError("sigma_k vanishes at evaluation point");
  const double sn = coeffs[static_cast<std::size_t>(n)];
  const double inv_sk = 1.0 / sk;

  const auto minors = minor_tables(lam);
  // sigma_n^{pp} = sigma_{n-1}(lam|p), sigma_k^{pp} = sigma_{k-1}(lam|p)
  Eigen::VectorXd sn_p(n), sk_p(n);
  for (int p = 0; p < n; ++p) {
    sn_p[p] = detail::coeff_or_zero(minors[static_cast<std::size_t>(p)], n - 1);
    sk_p[p] = detail::coeff_or_zero(minors[static_cast<std::size_t>(p)], k - 1);
  }

  OperatorJet out;
  out.value = sn * inv_sk;
  out.grad.resize(n);
  for (int p = 0; p < n; ++p)
    out.grad[p] = sn_p[p] * inv_sk - sn * sk_p[p] * inv_sk * inv_sk;

  out.hess_diag = Eigen::MatrixXd::Zero(n, n);
  out.hess_off = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> rest(static_cast<std::size_t>(n - 2));
  for (int p = 0; p < n; ++p) {
    out.hess_diag(p, p) = -2.0 * sn_p[p] * sk_p[p] * inv_sk * inv_sk +
                          2.0 * sn * sk_p[p] * sk_p[p] * inv_sk * inv_sk * inv_sk;
    for (int q = p + 1; q < n; ++q) {
      int t = 0;
      for (int s = 0; s < n; ++s)
        if (s != p && s != q) rest[static_cast<std::size_t>(t++)] = lam[s];
      const auto pair_coeffs = detail::elem_sym_coeffs(rest);
      // sigma_n^{pp,qq} = sigma_{n-2}(lam|pq), sigma_n^{pq,qp} = -sigma_{n-2}(lam|pq)
      const double sn_pq = detail::coeff_or_zero(pair_coeffs, n - 2);
      const double sk_pq = detail::coeff_or_zero(pair_coeffs, k - 2);
      const double diag =
          sn_pq * inv_sk - sn_p[p] * sk_p[q] * inv_sk * inv_sk -
          sn_p[q] * sk_p[p] * inv_sk * inv_sk - sn * sk_pq * inv_sk * inv_sk +
          2.0 * sn * sk_p[p] * sk_p[q] * inv_sk * inv_sk * inv_sk;
      out.hess_diag(p, q) = diag;
      out.hess_diag(q, p) = diag;
      const double off = -sn_pq * inv_sk + sn * sk_pq * inv_sk * inv_sk;
      out.hess_off(p, q) = off;
      out.hess_off(q, p) = off;
    }
  }
  return out;
}

Eigen::VectorXd grad_alt(const QuotientOperator& op, const OrderedSpectrum& lam) {
  check_operator(op);
  check_dimension(op, lam.spectrum());
  if (op.k != op.n - 2)
    throw std::invalid_argument("grad_alt: closed form requires k = n-2");
  lam.require_positive();

  const double f = f_value(op, lam.spectrum());
  double recip_sum = 0.0;
  for (int i = 0; i < op.n; ++i) recip_sum += 1.0 / lam[i];

  Eigen::VectorXd grad(op.n);
  for (int i = 0; i < op.n; ++i) {
    const double others = recip_sum - 1.0 / lam[i];
    grad[i] = f * f / (lam[i] * lam[i]) * others;
  }
  return grad;
}

double duality_gap(int n, int k, int l, const Spectrum& lam) {
  if (!(1 <= l && l < k && k <= n))
    throw std::invalid_argument("duality_gap: requires 1 <= l < k <= n");
  if (lam.n() != n)
    throw std::invalid_argument("duality_gap: spectrum dimension mismatch");
  std::vector<double> recip(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (lam[i] <= 0.0)
      throw std::domain_error("duality_gap: spectrum must be strictly positive");
    recip[static_cast<std::size_t>(i)] = 1.0 / lam[i];
  }
  const auto coeffs = sigma_all(lam);
  const auto recip_coeffs = detail::elem_sym_coeffs(recip);
  const double lhs = coeffs[static_cast<std::size_t>(n - k)] /
                     coeffs[static_cast<std::size_t>(n - l)];
  const double rhs = recip_coeffs[static_cast<std::size_t>(k)] /
                     recip_coeffs[static_cast<std::size_t>(l)];
  return std::abs(lhs - rhs);
}

double divided_difference_gap(const QuotientOperator& op, const Spectrum& lam,
                              int p, int q, double separation) {
  check_operator(op);
  check_dimension(op, lam);
  if (p == q || p < 0 || q < 0 || p >= op.n || q >= op.n)
    throw std::invalid_argument("divided_difference_gap: bad index pair");
  if (std::abs(lam[p] - lam[q]) <= separation)
    throw std::invalid_argument(
        "divided_difference_gap: eigenvalues closer than separation threshold");
  const OperatorJet j = jet(op, lam);
  const double lhs = -j.hess_off(p, q);
  const double rhs = (j.grad[p] - j.grad[q]) / (lam[q] - lam[p]);
  return std::abs(lhs - rhs);
}

double ConcavityTerms::gap(int n) const {
  return -quad - ratio + square - ratio / (2.0 * (n - 1));
}

double ConcavityTerms::scale() const {
  return 1.0 + std::max({std::abs(quad), std::abs(square), std::abs(ratio)});
}

ConcavityTerms concavity_terms(const QuotientOperator& op,
                               const OrderedSpectrum& lam,
                               std::span<const double> xi) {
  check_operator(op);
  if (op.n < 3)
    throw std::invalid_argument("concavity inequality requires n >= 3");
  if (op.k != op.n - 2)
    throw std::invalid_argument("concavity inequality requires k = n-2");
  if (static_cast<int>(xi.size()) != op.n)
    throw std::invalid_argument("concavity_terms: direction dimension mismatch");
  lam.require_positive();

  const OperatorJet j = jet(op, lam.spectrum());
  ConcavityTerms t;
  double dot = 0.0;
  for (int a = 0; a < op.n; ++a) {
    dot += j.grad[a] * xi[static_cast<std::size_t>(a)];
    for (int b = 0; b < op.n; ++b)
      t.quad += j.hess_diag(a, b) * xi[static_cast<std::size_t>(a)] *
                xi[static_cast<std::size_t>(b)];
  }
  t.square = 2.0 / j.value * dot * dot;
  t.ratio = j.grad[0] * xi[0] * xi[0] / lam[0];
  return t;
}

double concavity_gap(const QuotientOperator& op, const OrderedSpectrum& lam,
                     std::span<const double> xi) {
  return concavity_terms(op, lam, xi).gap(op.n);
}

SymmetricEigen symmetric_eigen_descending(const Eigen::MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("symmetric eigensolver failed to converge");
  const int n = static_cast<int>(w.rows());
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.values[i] = solver.eigenvalues()[n - 1 - i];
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

MatrixJet matrix_jet(const QuotientOperator& op, const SymmetricEigen& eig,
                     bool need_derivative) {
  check_operator(op);
  if (eig.values.size() != op.n)
    throw std::invalid_argument("matrix_jet: eigensystem dimension mismatch");
  Spectrum lam(std::vector<double>(eig.values.data(), eig.values.data() + op.n));

  MatrixJet out;
  if (!need_derivative) {
    out.value = f_value(op, lam);
    return out;
  }
  const OperatorJet j = jet(op, lam);
  out.value = j.value;
  out.derivative = eig.vectors * j.grad.asDiagonal() * eig.vectors.transpose();
  // The spectral first derivative is symmetric by construction up to rounding.
  out.derivative = 0.5 * (out.derivative + out.derivative.transpose()).eval();
  return out;
}

MatrixJet matrix_jet(const QuotientOperator& op, const Eigen::MatrixXd& w,
                     bool need_derivative) {
  check_operator(op);
  if (w.rows() != op.n || w.cols() != op.n)
    throw std::invalid_argument("matrix_jet: matrix dimension mismatch");
  const double asym = (w - w.transpose()).cwiseAbs().maxCoeff();
  const double scale = 1.0 + w.cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale)
    throw std::invalid_argument("matrix_jet: matrix is not symmetric");
  return matrix_jet(op, symmetric_eigen_descending(w), need_derivative);
}

}  // namespace cq
