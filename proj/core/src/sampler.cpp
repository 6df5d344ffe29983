#include "cq/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cq {

ConeDistribution parse_distribution(const std::string& name) {
  if (name == "loguniform") return ConeDistribution::LogUniform;
  if (name == "uniform") return ConeDistribution::UniformSpikes;
  if (name == "aniso") return ConeDistribution::Anisotropic;
  throw std::invalid_argument("unknown distribution: " + name);
}

std::string distribution_name(ConeDistribution dist) {
  switch (dist) {
    case ConeDistribution::LogUniform: return "loguniform";
    case ConeDistribution::UniformSpikes: return "uniform";
    case ConeDistribution::Anisotropic: return "aniso";
  }
  return "unknown";
}

ConeSampler::ConeSampler(int n, ConeDistribution dist, std::uint64_t seed)
    : n_(n), dist_(dist), rng_(seed) {
  if (n < 2) throw std::invalid_argument("ConeSampler: n >= 2 required");
}

OrderedSpectrum ConeSampler::next() {
  std::vector<double> values(static_cast<std::size_t>(n_));
  switch (dist_) {
    case ConeDistribution::LogUniform:
      for (double& v : values) v = rng_.log_uniform(1e-3, 1e3);
      break;
    case ConeDistribution::UniformSpikes:
      for (double& v : values) {
        v = rng_.uniform(1e-4, 1.0);
        if (rng_.uniform01() < 0.1) v *= std::pow(10.0, rng_.uniform(0.0, 4.0));
      }
      break;
    case ConeDistribution::Anisotropic: {
      // Endpoints span up to nine decades; interior entries fill between.
      const double top = rng_.uniform(0.0, 4.5);
      const double bottom = rng_.uniform(-4.5, 0.0);
      values[0] = std::pow(10.0, top);
      values[static_cast<std::size_t>(n_ - 1)] = std::pow(10.0, bottom);
      for (int i = 1; i < n_ - 1; ++i)
        values[static_cast<std::size_t>(i)] =
            std::pow(10.0, rng_.uniform(bottom, top));
      break;
    }
  }
  return OrderedSpectrum::sorted(std::move(values));
}

std::vector<double> ConeSampler::next_direction() {
  std::vector<double> xi(static_cast<std::size_t>(n_));
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& v : xi) {
      v = rng_.normal();
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : xi) v *= inv;
  return xi;
}

}  // namespace cq
