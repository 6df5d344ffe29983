#include <doctest.h>

#include <cmath>

#include "cq/errors.hpp"
#include "cq/quotient.hpp"
#include "cq/rng.hpp"
#include "cq/symfun.hpp"
#include "oracles.hpp"

using namespace cq;

namespace {

OrderedSpectrum random_positive(Rng& rng, int n) {
  std::vector<double> values(static_cast<std::size_t>(n));
  for (double& v : values) v = rng.log_uniform(1e-2, 1e2);
  return OrderedSpectrum::sorted(std::move(values));
}

}  // namespace

TEST_CASE("f_value worked examples") {
  CHECK(f_value({3, 1}, Spectrum({1.0, 1.0, 1.0})) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(f_value({3, 1}, Spectrum({1.0, 2.0, 3.0})) ==
        doctest::Approx(1.0).epsilon(1e-14));
  for (double t : {0.5, 1.0, 2.5})
    CHECK(f_value({4, 2}, Spectrum({t, t, t, t})) ==
          doctest::Approx(t * t / 6.0).epsilon(1e-13));
}

TEST_CASE("f_value rejects singular denominators") {
  CHECK_THROWS_AS(f_value({3, 1}, Spectrum({1.0, -0.5, -0.5})),
                  SingularDenominatorError);
  CHECK_THROWS_AS(f_value({3, 3}, Spectrum({1.0, 1.0, 1.0})),
                  std::invalid_argument);  // k must stay below n
}

TEST_CASE("jet gradient at the symmetric point") {
  const OperatorJet j = jet({3, 1}, Spectrum({1.0, 1.0, 1.0}));
  for (int i = 0; i < 3; ++i)
    CHECK(j.grad[i] == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      if (p != q) CHECK(j.hess_off(p, q) < 0.0);
}

TEST_CASE("jet derivatives match finite differences of the enumeration oracle") {
  Rng rng(31);
  for (int n = 3; n <= 6; ++n) {
    const QuotientOperator op = curvature_quotient(n);
    for (int rep = 0; rep < 60; ++rep) {
      const OrderedSpectrum lam = random_positive(rng, n);
      const OperatorJet j = jet(op, lam.spectrum());
      const Eigen::VectorXd fd = oracle::fd_grad(op, lam.vec());
      for (int i = 0; i < n; ++i)
        CHECK(std::abs(j.grad[i] - fd[i]) <=
              1e-6 * (1.0 + std::max(std::abs(j.grad[i]), std::abs(fd[i]))));
    }
  }
  // second derivatives on a handful of samples (the oracle is O(n^2) FD evals)
  for (int n : {3, 4}) {
    const QuotientOperator op = curvature_quotient(n);
    for (int rep = 0; rep < 8; ++rep) {
      std::vector<double> values(static_cast<std::size_t>(n));
      for (double& v : values) v = rng.uniform(0.5, 3.0);
      const Spectrum lam(values);
      const OperatorJet j = jet(op, lam);
      const Eigen::MatrixXd fd = oracle::fd_hess_diag(op, values);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          CHECK(std::abs(j.hess_diag(p, q) - fd(p, q)) <=
                1e-5 * (1.0 + std::abs(fd(p, q))));
      for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) {
          if (std::abs(lam[p] - lam[q]) < 0.2) continue;  // oracle degenerates
          const double fd_off = oracle::fd_hess_off(op, values, p, q);
          CHECK(std::abs(j.hess_off(p, q) - fd_off) <=
                2e-4 * (1.0 + std::abs(fd_off)));
        }
    }
  }
}

TEST_CASE("jet handles repeated eigenvalues smoothly") {
  const OperatorJet j = jet({4, 2}, Spectrum({2.0, 2.0, 2.0, 2.0}));
  CHECK(std::isfinite(j.hess_off(0, 1)));
  CHECK(j.hess_off(0, 1) < 0.0);
  CHECK(j.hess_off(0, 1) == doctest::Approx(j.hess_off(2, 3)).epsilon(1e-14));
}

TEST_CASE("grad_alt equals the jet gradient on the positive cone") {
  Rng rng(47);
  for (int n : {3, 5}) {
    const QuotientOperator op = curvature_quotient(n);
    for (int rep = 0; rep < 300; ++rep) {
      const OrderedSpectrum lam = random_positive(rng, n);
      const OperatorJet j = jet(op, lam.spectrum());
      const Eigen::VectorXd alt = grad_alt(op, lam);
      for (int i = 0; i < n; ++i)
        CHECK(std::abs(alt[i] - j.grad[i]) <= 1e-10 * (1.0 + std::abs(j.grad[i])));
    }
  }
  CHECK(grad_alt(curvature_quotient(3), OrderedSpectrum({1.0, 1.0, 1.0}))[0] ==
        doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  CHECK_THROWS_AS(grad_alt({3, 0}, OrderedSpectrum({3.0, 2.0, 1.0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      grad_alt(curvature_quotient(3), OrderedSpectrum({1.0, 0.5, -1.0})),
      std::domain_error);
}

TEST_CASE("duality identity") {
  CHECK(duality_gap(3, 2, 1, Spectrum({1.0, 2.0, 3.0})) <= 1e-15);
  for (double t : {0.3, 1.0, 7.0})
    CHECK(duality_gap(4, 3, 2, Spectrum({t, t, t, t})) <= 1e-14);

  Rng rng(53);
  const int n = 6;
  for (int rep = 0; rep < 300; ++rep) {
    const OrderedSpectrum lam = random_positive(rng, n);
    for (int k = 2; k <= n; ++k)
      for (int l = 1; l < k; ++l) {
        const double lhs = sigma(n - k, lam.spectrum()) / sigma(n - l, lam.spectrum());
        CHECK(duality_gap(n, k, l, lam.spectrum()) <= 1e-12 * (1.0 + std::abs(lhs)));
      }
  }
  CHECK_THROWS_AS(duality_gap(3, 1, 1, Spectrum({1.0, 2.0, 3.0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(duality_gap(3, 2, 1, Spectrum({1.0, -2.0, 3.0})),
                  std::domain_error);
}

TEST_CASE("divided-difference identity") {
  CHECK(divided_difference_gap({3, 1}, Spectrum({3.0, 2.0, 1.0}), 0, 2) <= 1e-8);

  Rng rng(59);
  const QuotientOperator op{4, 2};
  for (int rep = 0; rep < 200; ++rep) {
    const OrderedSpectrum lam = random_positive(rng, 4);
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q) {
        if (std::abs(lam[p] - lam[q]) <= 1e-3) continue;
        const OperatorJet j = jet(op, lam.spectrum());
        const double scale =
            1.0 + std::max(std::abs(j.hess_off(p, q)),
                           std::abs((j.grad[p] - j.grad[q]) / (lam[q] - lam[p])));
        CHECK(divided_difference_gap(op, lam.spectrum(), p, q) <= 1e-8 * scale);
      }
  }
  CHECK_THROWS_AS(divided_difference_gap({3, 1}, Spectrum({2.0, 2.0, 1.0}), 0, 1),
                  std::invalid_argument);
}

TEST_CASE("concavity gap: frozen value and basic structure") {
  const QuotientOperator op = curvature_quotient(3);
  const OrderedSpectrum lam({3.0, 2.0, 1.0});

  std::vector<double> zero{0.0, 0.0, 0.0};
  CHECK(concavity_gap(op, lam, zero) == 0.0);

  // Value pinned by the finite-difference Hessian oracle: G = 1/24.
  std::vector<double> e1{1.0, 0.0, 0.0};
  const double gap = concavity_gap(op, lam, e1);
  CHECK(gap == doctest::Approx(1.0 / 24.0).epsilon(1e-12));

  const Eigen::MatrixXd fd_hess = oracle::fd_hess_diag(op, lam.vec());
  const Eigen::VectorXd fd_grad = oracle::fd_grad(op, lam.vec());
  const double f = oracle::f_enum(op, lam.vec());
  const double oracle_gap = -fd_hess(0, 0) - fd_grad[0] / 3.0 +
                            2.0 / f * fd_grad[0] * fd_grad[0] -
                            0.25 * fd_grad[0] / 3.0;
  CHECK(gap == doctest::Approx(oracle_gap).epsilon(1e-4));
}

TEST_CASE("concavity gap is nonnegative over sampled cones") {
  Rng rng(61);
  for (int n : {3, 4, 5}) {
    const QuotientOperator op = curvature_quotient(n);
    for (int rep = 0; rep < 2000; ++rep) {
      std::vector<double> values(static_cast<std::size_t>(n));
      for (double& v : values) v = rng.log_uniform(1e-3, 1e3);
      const OrderedSpectrum lam = OrderedSpectrum::sorted(std::move(values));
      std::vector<double> xi(static_cast<std::size_t>(n));
      for (double& v : xi) v = rng.normal();
      const ConcavityTerms terms = concavity_terms(op, lam, xi);
      CHECK(terms.gap(n) >= -1e-9 * terms.scale());
    }
  }
}

TEST_CASE("matrix_jet reduces to the eigenvalue jet on diagonals") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
  w.diagonal() << 1.0, 2.0, 3.0;
  const MatrixJet mj = matrix_jet({3, 1}, w, true);
  CHECK(mj.value == doctest::Approx(1.0).epsilon(1e-14));
  const OperatorJet j = jet({3, 1}, Spectrum({3.0, 2.0, 1.0}));
  // grad[p] belongs to the p-th largest eigenvalue, so W_22 = 3 pairs with grad[0]
  CHECK(mj.derivative(2, 2) == doctest::Approx(j.grad[0]).epsilon(1e-12));
  CHECK(mj.derivative(1, 1) == doctest::Approx(j.grad[1]).epsilon(1e-12));
  CHECK(mj.derivative(0, 0) == doctest::Approx(j.grad[2]).epsilon(1e-12));
  CHECK(std::abs(mj.derivative(0, 1)) <= 1e-12);
}

TEST_CASE("matrix_jet is spectrally invariant and matches directional FD") {
  Rng rng(67);
  const QuotientOperator op = curvature_quotient(3);
  for (int rep = 0; rep < 20; ++rep) {
    // random rotation via QR of a Gaussian matrix
    Eigen::MatrixXd gauss(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) gauss(i, j) = rng.normal();
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
    const Eigen::MatrixXd rot = qr.householderQ();

    Eigen::VectorXd lam(3);
    lam << rng.uniform(0.5, 4.0), rng.uniform(0.5, 4.0), rng.uniform(0.5, 4.0);
    const Eigen::MatrixXd w = rot * lam.asDiagonal() * rot.transpose();

    std::vector<double> values{lam[0], lam[1], lam[2]};
    const double direct = f_value(op, Spectrum(values));
    const MatrixJet mj = matrix_jet(op, w, true);
    CHECK(std::abs(mj.value - direct) <= 1e-12 * (1.0 + std::abs(direct)));

    for (int dir_rep = 0; dir_rep < 10; ++dir_rep) {
      Eigen::MatrixXd v(3, 3);
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
          v(i, j) = rng.normal();
          v(j, i) = v(i, j);
        }
      const double eps = 1e-6;
      const double fd = (oracle::f_of_matrix(op, w + eps * v) -
                         oracle::f_of_matrix(op, w - eps * v)) /
                        (2.0 * eps);
      const double got = (mj.derivative.array() * v.array()).sum();
      CHECK(std::abs(got - fd) <= 1e-6 * (1.0 + std::abs(fd)));
    }
  }
}

TEST_CASE("matrix_jet derivative is basis independent at repeated eigenvalues") {
  const QuotientOperator op = curvature_quotient(3);
  // fully repeated spectrum: derivative must be a multiple of the identity
  const Eigen::MatrixXd round = 2.0 * Eigen::MatrixXd::Identity(3, 3);
  const MatrixJet mj_round = matrix_jet(op, round, true);
  const double g = jet(op, Spectrum({2.0, 2.0, 2.0})).grad[0];
  CHECK((mj_round.derivative - g * Eigen::MatrixXd::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() <= 1e-14);

  // two-fold eigenspace: the repeated block stays isotropic
  Eigen::MatrixXd flat = Eigen::MatrixXd::Zero(3, 3);
  flat.diagonal() << 2.0, 2.0, 1.0;
  const MatrixJet mj_flat = matrix_jet(op, flat, true);
  CHECK(mj_flat.derivative(0, 0) ==
        doctest::Approx(mj_flat.derivative(1, 1)).epsilon(1e-13));
  CHECK(std::abs(mj_flat.derivative(0, 1)) <= 1e-13);
  CHECK(std::abs(mj_flat.derivative(0, 2)) <= 1e-13);
}

TEST_CASE("matrix_jet rejects asymmetric input") {
  Eigen::MatrixXd w(3, 3);
  w << 1.0, 0.5, 0.0, -0.5, 2.0, 0.0, 0.0, 0.0, 3.0;
  CHECK_THROWS_AS(matrix_jet(curvature_quotient(3), w, false),
                  std::invalid_argument);
}

TEST_CASE("homogeneity, Euler identity, ellipticity and gradient ordering") {
  Rng rng(71);
  for (int n : {3, 4, 6}) {
    const QuotientOperator op = curvature_quotient(n);
    for (int rep = 0; rep < 200; ++rep) {
      const OrderedSpectrum lam = random_positive(rng, n);
      const double f = f_value(op, lam.spectrum());

      const double scale = rng.log_uniform(1e-2, 1e2);
      std::vector<double> scaled = lam.vec();
      for (double& v : scaled) v *= scale;
      const double f_scaled = f_value(op, Spectrum(scaled));
      CHECK(std::abs(f_scaled - scale * scale * f) <=
            1e-12 * (1.0 + std::abs(f_scaled)));

      const OperatorJet j = jet(op, lam.spectrum());
      double euler = 0.0;
      for (int i = 0; i < n; ++i) {
        CHECK(j.grad[i] > 0.0);
        euler += j.grad[i] * lam[i];
        if (i > 0) CHECK(j.grad[i] >= j.grad[i - 1] * (1.0 - 1e-12));
      }
      CHECK(std::abs(euler - 2.0 * f) <= 1e-10 * (1.0 + std::abs(f)));
    }
  }
}
