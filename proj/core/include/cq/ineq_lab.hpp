#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cq/sampler.hpp"
#include "cq/spectrum.hpp"

namespace cq {

/// One evaluated gap predicate. `gap` is scaled by 1 + max(|terms|); the
/// predicate is satisfied when gap >= -tolerance.
struct GapRecord {
  std::string lemma;
  OrderedSpectrum lam;
  double gap = 0.0;
  std::optional<double> implied;
};

/// Pair bound lam_{n-1} lam_n in [F, binom(n,2) F]; implied constant is
/// lam_{n-1} lam_n / F.
std::vector<GapRecord> check_lemma23(const OrderedSpectrum& lam);

/// Elementwise gradient bounds, trace bounds with candidates C1 = n and
/// C1' = 2, the Euler residual |sum F^{ii} lam_i - 2F|, and the weighted
/// square bounds with C2 = n-1, C3 = n(n-1).
std::vector<GapRecord> check_lemma24(const OrderedSpectrum& lam);

/// sum_{i<n} 1/lam_i <= lam_n / F <= n sum_{i<n} 1/lam_i; implied constant is
/// the middle/left ratio.
std::vector<GapRecord> check_lemma25(const OrderedSpectrum& lam);

/// Concavity gap of F at (lam, xi).
GapRecord check_lemma26(const OrderedSpectrum& lam, std::span<const double> xi);

/// Row identities of the campaign report.
enum class LabCheck : int {
  Identities = 0,  // Lemma 2.1, worst over k
  DividedDiff,     // Lemma 2.2 divided-difference identity, worst eligible pair
  Duality,         // reciprocal duality, worst over 1 <= l < k <= n
  L23Lower,
  L23Upper,
  L24Elementwise,
  L24TraceLower,
  L24TraceUpper,
  L24Euler,
  L24SquareLower,
  L24SquareUpper,
  L25Lower,
  L25Upper,
  L26Concavity,
  kCount
};

constexpr int kLabCheckCount = static_cast<int>(LabCheck::kCount);

const char* lab_check_name(LabCheck check);

struct CampaignConfig {
  std::vector<int> dims = {3, 4, 5, 6};
  long long samples = 100000;
  ConeDistribution dist = ConeDistribution::Anisotropic;
  std::uint64_t seed = 42;
  double tolerance = 1e-9;
};

struct LemmaStats {
  std::string lemma;
  int n = 0;
  long long samples = 0;
  double min_gap = 0.0;
  std::vector<double> argmin;
  bool has_implied = false;
  double implied_max = 0.0;
  long long violations = 0;
};

struct CampaignReport {
  CampaignConfig config;
  std::vector<LemmaStats> rows;

  long long total_violations() const;
  const LemmaStats* find(LabCheck check, int n) const;
};

/// Runs every check over `samples` spectra per dimension. Deterministic for a
/// fixed (seed, config) independent of the worker count.
CampaignReport run_campaign(const CampaignConfig& config);

/// CSV schema: lemma_id,n,samples,min_gap,argmin_lambda,implied_constant_max,violations
void write_campaign_csv(const CampaignReport& report, const std::string& path);

}  // namespace cq
