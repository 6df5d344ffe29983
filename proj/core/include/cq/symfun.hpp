#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cq/spectrum.hpp"

namespace cq {

/// k-th elementary symmetric polynomial of lam, evaluated by the coefficient
/// recurrence for prod_i (t + lam_i). sigma(0, .) == 1. Throws
/// std::invalid_argument for k outside [0, n].
double sigma(int k, const Spectrum& lam);

/// All coefficients sigma_0..sigma_n in one O(n^2) pass.
std::vector<double> sigma_all(const Spectrum& lam);

/// sigma_k of lam with entry i removed. Requires 0 <= k <= n-1 and 0 <= i < n.
double sigma_minor(int k, const Spectrum& lam, int i);

/// sigma_k of lam with entries i and j removed. Requires i != j, 0 <= k <= n-2.
double sigma_minor2(int k, const Spectrum& lam, int i, int j);

/// Absolute residuals of the four elementary-symmetric identities, each scaled
/// by (|sigma_k(lam)| + 1):
///   deletion:            sigma_k - lam_i sigma_{k-1}(lam|i) - sigma_k(lam|i)
///   minor_sum:           sum_i sigma_k(lam|i) - (n-k) sigma_k
///   weighted_minor_sum:  sum_i lam_i sigma_{k-1}(lam|i) - k sigma_k
///   weighted_square_sum: sum_i lam_i^2 sigma_{k-1}(lam|i) - sigma_1 sigma_k + (k+1) sigma_{k+1}
struct IdentityResiduals {
  double deletion = 0.0;
  double minor_sum = 0.0;
  double weighted_minor_sum = 0.0;
  double weighted_square_sum = 0.0;

  double max() const;
};

/// Evaluates the identity residuals for 1 <= k <= n-1. When `i` is given the
/// deletion residual uses that index; otherwise the worst index is reported.
IdentityResiduals identity_residuals(int k, const Spectrum& lam,
                                     std::optional<int> i = std::nullopt);

namespace detail {

/// Elementary symmetric coefficients of an arbitrary value span, sigma_0..sigma_m.
std::vector<double> elem_sym_coeffs(std::span<const double> values);

/// sigma_k with the out-of-range convention sigma_k = 0 for k < 0 or k > size.
double coeff_or_zero(std::span<const double> coeffs, int k);

}  // namespace detail

}  // namespace cq
