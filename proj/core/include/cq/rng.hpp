#pragma once

#include <cstdint>
#include <random>

namespace cq {

/// Deterministic uniform/normal draws on top of std::mt19937_64. The mappings
/// from raw 64-bit words to doubles are hand-rolled so that identical seeds
/// give identical streams on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// log-uniform over [lo, hi], lo > 0.
  double log_uniform(double lo, double hi);

  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Stable seed mixing for derived streams (worker/job substreams).
std::uint64_t seed_mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace cq
