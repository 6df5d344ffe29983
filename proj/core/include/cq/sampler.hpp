#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cq/rng.hpp"
#include "cq/spectrum.hpp"

namespace cq {

enum class ConeDistribution {
  LogUniform,    // each entry log-uniform over [1e-3, 1e3]
  UniformSpikes, // uniform over [1e-4, 1] with occasional large spikes
  Anisotropic,   // lam_1 huge, lam_n tiny; ratio up to 1e9
};

ConeDistribution parse_distribution(const std::string& name);
std::string distribution_name(ConeDistribution dist);

/// Deterministic sampler of strictly positive descending spectra. Identical
/// (n, distribution, seed) reproduce the identical stream.
class ConeSampler {
 public:
  ConeSampler(int n, ConeDistribution dist, std::uint64_t seed);

  int n() const noexcept { return n_; }

  /// Next spectrum, sorted descending, all entries strictly positive.
  OrderedSpectrum next();

  /// Random unit direction in R^n from the same stream.
  std::vector<double> next_direction();

 private:
  int n_;
  ConeDistribution dist_;
  Rng rng_;
};

}  // namespace cq
