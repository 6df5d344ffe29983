#include "cq/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cq {

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2)
    throw std::invalid_argument("Spectrum: requires n >= 2 entries");
  for (double v : values_) {
    if (!std::isfinite(v))
      throw std::invalid_argument("Spectrum: entries must be finite");
  }
}

OrderedSpectrum::OrderedSpectrum(std::vector<double> values)
    : spectrum_(std::move(values)) {
  const auto& v = spectrum_.vec();
  if (!std::is_sorted(v.rbegin(), v.rend()))
    throw std::invalid_argument("OrderedSpectrum: values must be sorted descending");
}

OrderedSpectrum OrderedSpectrum::sorted(std::vector<double> values) {
  std::sort(values.begin(), values.end(), std::greater<double>());
  return OrderedSpectrum(std::move(values));
}

bool OrderedSpectrum::strictly_positive() const noexcept {
  return spectrum_[n() - 1] > 0.0;
}

void OrderedSpectrum::require_positive() const {
  if (!strictly_positive())
    throw std::domain_error("OrderedSpectrum: spectrum not in the positive cone");
}

}  // namespace cq
