#pragma once

#include <span>
#include <vector>

namespace cq {

/// A vector of principal curvature values. Entries must be finite and n >= 2.
class Spectrum {
 public:
  explicit Spectrum(std::vector<double> values);

  int n() const noexcept { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vec() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

/// A Spectrum sorted descending: values[0] >= values[1] >= ... >= values[n-1].
class OrderedSpectrum {
 public:
  /// Validates the descending order of `values`.
  explicit OrderedSpectrum(std::vector<double> values);

  /// Sorts a copy descending and wraps it.
  static OrderedSpectrum sorted(std::vector<double> values);

  int n() const noexcept { return spectrum_.n(); }
  double operator[](int i) const { return spectrum_[i]; }
  const Spectrum& spectrum() const noexcept { return spectrum_; }
  const std::vector<double>& vec() const noexcept { return spectrum_.vec(); }

  /// Positive-cone membership: values[n-1] > 0.
  bool strictly_positive() const noexcept;

  /// Throws std::domain_error unless strictly positive.
  void require_positive() const;

 private:
  Spectrum spectrum_;
};

}  // namespace cq
