#include "cq/symfun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cq {

namespace detail {

std::vector<double> elem_sym_coeffs(std::span<const double> values) {
  // Expand prod_i (t + v_i); coeffs[k] is the coefficient of t^(m-k) = sigma_k.
  std::vector<double> coeffs(values.size() + 1, 0.0);
  coeffs[0] = 1.0;
  std::size_t used = 0;
  for (double v : values) {
    ++used;
    for (std::size_t k = used; k >= 1; --k) coeffs[k] += v * coeffs[k - 1];
  }
  return coeffs;
}

double coeff_or_zero(std::span<const double> coeffs, int k) {
  if (k < 0 || k >= static_cast<int>(coeffs.size())) return 0.0;
  return coeffs[static_cast<std::size_t>(k)];
}

namespace {

std::vector<double> deleted_values(const Spectrum& lam, int i, int j = -1) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(lam.n()));
  for (int t = 0; t < lam.n(); ++t) {
    if (t == i || t == j) continue;
    out.push_back(lam[t]);
  }
  return out;
}

}  // namespace
}  // namespace detail

double sigma(int k, const Spectrum& lam) {
  if (k < 0 || k > lam.n())
    throw std::invalid_argument("sigma: k out of range [0, n]");
  if (k == 0) return 1.0;
  return detail::elem_sym_coeffs(lam.values())[static_cast<std::size_t>(k)];
}

std::vector<double> sigma_all(const Spectrum& lam) {
  return detail::elem_sym_coeffs(lam.values());
}

double sigma_minor(int k, const Spectrum& lam, int i) {
  if (i < 0 || i >= lam.n())
    throw std::invalid_argument("sigma_minor: index out of range");
  if (k < 0 || k > lam.n() - 1)
    throw std::invalid_argument("sigma_minor: k out of range [0, n-1]");
  if (k == 0) return 1.0;
  auto rest = detail::deleted_values(lam, i);
  return detail::elem_sym_coeffs(rest)[static_cast<std::size_t>(k)];
}

double sigma_minor2(int k, const Spectrum& lam, int i, int j) {
  if (i == j) throw std::invalid_argument("sigma_minor2: indices must differ");
  if (i < 0 || i >= lam.n() || j < 0 || j >= lam.n())
    throw std::invalid_argument("sigma_minor2: index out of range");
  if (k < 0 || k > lam.n() - 2)
    throw std::invalid_argument("sigma_minor2: k out of range [0, n-2]");
  if (k == 0) return 1.0;
  auto rest = detail::deleted_values(lam, i, j);
  return detail::elem_sym_coeffs(rest)[static_cast<std::size_t>(k)];
}

double IdentityResiduals::max() const {
  return std::max({deletion, minor_sum, weighted_minor_sum, weighted_square_sum});
}

IdentityResiduals identity_residuals(int k, const Spectrum& lam,
                                     std::optional<int> i) {
  const int n = lam.n();
  if (k < 1 || k > n - 1)
    throw std::invalid_argument("identity_residuals: k out of range [1, n-1]");
  if (i && (*i < 0 || *i >= n))
    throw std::invalid_argument("identity_residuals: index out of range");

  const auto coeffs = detail::elem_sym_coeffs(lam.values());
  const double sk = coeffs[static_cast<std::size_t>(k)];
  const double s1 = coeffs[1];
  const double sk1 = detail::coeff_or_zero(coeffs, k + 1);

  // Residuals are scaled by 1 + max(|participating terms|); with signed
  // entries sigma_k can cancel to zero while the summands stay large, and no
  // floating evaluation keeps the residual small against |sigma_k| alone.
  double deletion = 0.0;
  double deletion_scale = 0.0;
  double minor_total = 0.0;
  double minor_mag = 0.0;
  double weighted_total = 0.0;
  double weighted_mag = 0.0;
  double square_total = 0.0;
  double square_mag = 0.0;
  for (int p = 0; p < n; ++p) {
    const auto minor = detail::elem_sym_coeffs(detail::deleted_values(lam, p));
    const double mk = detail::coeff_or_zero(minor, k);
    const double mkm1 = detail::coeff_or_zero(minor, k - 1);
    minor_total += mk;
    minor_mag += std::abs(mk);
    weighted_total += lam[p] * mkm1;
    weighted_mag += std::abs(lam[p] * mkm1);
    square_total += lam[p] * lam[p] * mkm1;
    square_mag += std::abs(lam[p] * lam[p] * mkm1);
    const double res = std::abs(sk - lam[p] * mkm1 - mk);
    if (i ? (*i == p) : (res > deletion)) {
      deletion = res;
      deletion_scale = std::max(std::abs(lam[p] * mkm1), std::abs(mk));
    }
  }

  const double abs_sk = std::abs(sk);
  IdentityResiduals out;
  out.deletion = deletion / (1.0 + std::max(abs_sk, deletion_scale));
  out.minor_sum = std::abs(minor_total - (n - k) * sk) /
                  (1.0 + std::max((n - k) * abs_sk, minor_mag));
  out.weighted_minor_sum = std::abs(weighted_total - k * sk) /
                           (1.0 + std::max(k * abs_sk, weighted_mag));
  out.weighted_square_sum =
      std::abs(square_total - s1 * sk + (k + 1) * sk1) /
      (1.0 + std::max({std::abs(s1 * sk), (k + 1) * std::abs(sk1), square_mag}));
  return out;
}

}  // namespace cq
