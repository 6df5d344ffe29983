#include "cq/ineq_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cq/io.hpp"
#include "cq/parallel.hpp"
#include "cq/quotient.hpp"
#include "cq/symfun.hpp"

namespace cq {

namespace {

constexpr long long kJobChunk = 8192;
constexpr double kInf = std::numeric_limits<double>::infinity();

double binom2(int n) { return 0.5 * n * (n - 1); }

struct Entry {
  double gap = 0.0;
  double implied = 0.0;
  bool has_implied = false;
  bool valid = false;
};

using EntryArray = std::array<Entry, kLabCheckCount>;

Entry& at(EntryArray& entries, LabCheck check) {
  return entries[static_cast<std::size_t>(check)];
}

double scaled(double raw, double a, double b) {
  return raw / (1.0 + std::max(std::abs(a), std::abs(b)));
}

void require_campaign_spectrum(const OrderedSpectrum& lam) {
  if (lam.n() < 3)
    throw std::invalid_argument("lemma checks require n >= 3");
  lam.require_positive();
}

/// Computes every campaign entry for one sample. `xi` drives the concavity
/// check and must have dimension n.
void evaluate_sample(const OrderedSpectrum& lam, std::span<const double> xi,
                     EntryArray& out) {
  const int n = lam.n();
  const QuotientOperator op = curvature_quotient(n);
  const OperatorJet j = jet(op, lam.spectrum());
  const double f = j.value;

  // Lemma 2.1, worst identity residual over k (residuals arrive term-scaled).
  {
    double worst = 0.0;
    for (int k = 1; k <= n - 1; ++k)
      worst = std::max(worst, identity_residuals(k, lam.spectrum()).max());
    at(out, LabCheck::Identities) = {-worst, 0.0, false, true};
  }

  // Lemma 2.2 divided-difference identity over well separated pairs.
  {
    double worst = -1.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(lam[p] - lam[q]) <= 1e-3) continue;
        const double lhs = -j.hess_off(p, q);
        const double rhs = (j.grad[p] - j.grad[q]) / (lam[q] - lam[p]);
        worst = std::max(worst, std::abs(scaled(lhs - rhs, lhs, rhs)));
      }
    }
    if (worst >= 0.0) at(out, LabCheck::DividedDiff) = {-worst, 0.0, false, true};
  }

  // Reciprocal duality over all admissible (l, k) pairs.
  {
    double worst = 0.0;
    for (int k = 2; k <= n; ++k)
      for (int l = 1; l < k; ++l) {
        const double gap = duality_gap(n, k, l, lam.spectrum());
        const double lhs = sigma(n - k, lam.spectrum()) / sigma(n - l, lam.spectrum());
        worst = std::max(worst, gap / (1.0 + std::abs(lhs)));
      }
    at(out, LabCheck::Duality) = {-worst, 0.0, false, true};
  }

  // Lemma 2.3: F <= lam_{n-1} lam_n <= binom(n,2) F.
  {
    const double pair = lam[n - 2] * lam[n - 1];
    const double implied = pair / f;
    at(out, LabCheck::L23Lower) = {scaled(pair - f, pair, f), implied, true, true};
    const double cap = binom2(n) * f;
    at(out, LabCheck::L23Upper) = {scaled(cap - pair, cap, pair), implied, true, true};
  }

  // Lemma 2.4 (i): F^{ii} >= F^2/(lam_i^2 lam_n), F^{nn} >= F^2/(lam_n^2 lam_{n-1}).
  {
    double worst = kInf;
    for (int i = 0; i < n; ++i) {
      const double partner = (i == n - 1) ? lam[n - 2] : lam[n - 1];
      const double bound = f * f / (lam[i] * lam[i] * partner);
      worst = std::min(worst, scaled(j.grad[i] - bound, j.grad[i], bound));
    }
    at(out, LabCheck::L24Elementwise) = {worst, 0.0, false, true};
  }

  const double trace = j.grad.sum();
  const double euler = j.grad.dot(
      Eigen::Map<const Eigen::VectorXd>(lam.vec().data(), n));
  double square = 0.0;
  for (int i = 0; i < n; ++i) square += j.grad[i] * lam[i] * lam[i];

  // Lemma 2.4 (ii): F/(n lam_n) <= sum F^{ii} <= 2 F / lam_n.
  {
    const double lo = f / (n * lam[n - 1]);
    const double hi = 2.0 * f / lam[n - 1];
    const double implied = trace * lam[n - 1] / f;
    at(out, LabCheck::L24TraceLower) = {scaled(trace - lo, trace, lo), implied, true, true};
    at(out, LabCheck::L24TraceUpper) = {scaled(hi - trace, hi, trace), implied, true, true};
  }

  // Lemma 2.4 (iii): Euler identity sum F^{ii} lam_i = 2F for the degree-2
  // quotient. The implied column records the ratio against F itself.
  at(out, LabCheck::L24Euler) = {-std::abs(scaled(euler - 2.0 * f, euler, 2.0 * f)),
                                 euler / f, true, true};

  // Lemma 2.4 (iv): (n-1) F^2/lam_n <= sum F^{ii} lam_i^2 <= n(n-1) F^2/lam_n.
  {
    const double lo = (n - 1) * f * f / lam[n - 1];
    const double hi = static_cast<double>(n) * (n - 1) * f * f / lam[n - 1];
    const double implied = square * lam[n - 1] / (f * f);
    at(out, LabCheck::L24SquareLower) = {scaled(square - lo, square, lo), implied, true, true};
    at(out, LabCheck::L24SquareUpper) = {scaled(hi - square, hi, square), implied, true, true};
  }

  // Lemma 2.5: sum_{i<n} 1/lam_i <= lam_n/F <= n sum_{i<n} 1/lam_i.
  {
    double head = 0.0;
    for (int i = 0; i < n - 1; ++i) head += 1.0 / lam[i];
    const double mid = lam[n - 1] / f;
    const double implied = mid / head;
    at(out, LabCheck::L25Lower) = {scaled(mid - head, mid, head), implied, true, true};
    const double cap = n * head;
    at(out, LabCheck::L25Upper) = {scaled(cap - mid, cap, mid), implied, true, true};
  }

  // Lemma 2.6 concavity gap.
  {
    const ConcavityTerms t = concavity_terms(curvature_quotient(n), lam, xi);
    at(out, LabCheck::L26Concavity) = {t.gap(n) / t.scale(), 0.0, false, true};
  }
}

GapRecord make_record(LabCheck check, const OrderedSpectrum& lam,
                      const EntryArray& entries) {
  const Entry& e = entries[static_cast<std::size_t>(check)];
  GapRecord rec{lab_check_name(check), lam, e.gap, std::nullopt};
  if (e.has_implied) rec.implied = e.implied;
  return rec;
}

}  // namespace

const char* lab_check_name(LabCheck check) {
  switch (check) {
    case LabCheck::Identities: return "2.1";
    case LabCheck::DividedDiff: return "2.2dd";
    case LabCheck::Duality: return "duality";
    case LabCheck::L23Lower: return "2.3_lower";
    case LabCheck::L23Upper: return "2.3_upper";
    case LabCheck::L24Elementwise: return "2.4i";
    case LabCheck::L24TraceLower: return "2.4ii_lower";
    case LabCheck::L24TraceUpper: return "2.4ii_upper";
    case LabCheck::L24Euler: return "2.4iii_euler";
    case LabCheck::L24SquareLower: return "2.4iv_lower";
    case LabCheck::L24SquareUpper: return "2.4iv_upper";
    case LabCheck::L25Lower: return "2.5_lower";
    case LabCheck::L25Upper: return "2.5_upper";
    case LabCheck::L26Concavity: return "2.6";
    case LabCheck::kCount: break;
  }
  return "unknown";
}

std::vector<GapRecord> check_lemma23(const OrderedSpectrum& lam) {
  require_campaign_spectrum(lam);
  EntryArray entries{};
  std::vector<double> xi(static_cast<std::size_t>(lam.n()), 0.0);
  evaluate_sample(lam, xi, entries);
  return {make_record(LabCheck::L23Lower, lam, entries),
          make_record(LabCheck::L23Upper, lam, entries)};
}

std::vector<GapRecord> check_lemma24(const OrderedSpectrum& lam) {
  require_campaign_spectrum(lam);
  EntryArray entries{};
  std::vector<double> xi(static_cast<std::size_t>(lam.n()), 0.0);
  evaluate_sample(lam, xi, entries);
  return {make_record(LabCheck::L24Elementwise, lam, entries),
          make_record(LabCheck::L24TraceLower, lam, entries),
          make_record(LabCheck::L24TraceUpper, lam, entries),
          make_record(LabCheck::L24Euler, lam, entries),
          make_record(LabCheck::L24SquareLower, lam, entries),
          make_record(LabCheck::L24SquareUpper, lam, entries)};
}

std::vector<GapRecord> check_lemma25(const OrderedSpectrum& lam) {
  require_campaign_spectrum(lam);
  EntryArray entries{};
  std::vector<double> xi(static_cast<std::size_t>(lam.n()), 0.0);
  evaluate_sample(lam, xi, entries);
  return {make_record(LabCheck::L25Lower, lam, entries),
          make_record(LabCheck::L25Upper, lam, entries)};
}

GapRecord check_lemma26(const OrderedSpectrum& lam, std::span<const double> xi) {
  require_campaign_spectrum(lam);
  const ConcavityTerms t = concavity_terms(curvature_quotient(lam.n()), lam, xi);
  return {lab_check_name(LabCheck::L26Concavity), lam, t.gap(lam.n()) / t.scale(),
          std::nullopt};
}

long long CampaignReport::total_violations() const {
  long long total = 0;
  for (const auto& row : rows) total += row.violations;
  return total;
}

const LemmaStats* CampaignReport::find(LabCheck check, int n) const {
  for (const auto& row : rows)
    if (row.n == n && row.lemma == lab_check_name(check)) return &row;
  return nullptr;
}

namespace {

struct Accumulator {
  long long count = 0;
  double min_gap = kInf;
  std::vector<double> argmin;
  bool has_implied = false;
  double implied_max = -kInf;
  long long violations = 0;

  void add(const Entry& e, const OrderedSpectrum& lam, double tolerance) {
    if (!e.valid) return;
    ++count;
    if (e.gap < min_gap) {
      min_gap = e.gap;
      argmin = lam.vec();
    }
    if (e.has_implied) {
      has_implied = true;
      implied_max = std::max(implied_max, e.implied);
    }
    if (e.gap < -tolerance) ++violations;
  }

  void merge(const Accumulator& other) {
    count += other.count;
    violations += other.violations;
    if (other.has_implied) {
      has_implied = true;
      implied_max = std::max(implied_max, other.implied_max);
    }
    if (other.count > 0 && other.min_gap < min_gap) {
      min_gap = other.min_gap;
      argmin = other.argmin;
    }
  }
};

}  // namespace

CampaignReport run_campaign(const CampaignConfig& config) {
  for (int n : config.dims)
    if (n < 3) throw std::invalid_argument("run_campaign: dims must be >= 3");
  if (config.samples < 0)
    throw std::invalid_argument("run_campaign: negative sample count");
  if (config.tolerance <= 0.0)
    throw std::invalid_argument("run_campaign: tolerance must be positive");

  CampaignReport report;
  report.config = config;
  if (config.samples == 0) return report;

  for (int n : config.dims) {
    const long long jobs = (config.samples + kJobChunk - 1) / kJobChunk;
    std::vector<std::array<Accumulator, kLabCheckCount>> partial(
        static_cast<std::size_t>(jobs));

    parallel_jobs(jobs, [&](long long job) {
      ConeSampler sampler(n, config.dist,
                          seed_mix(config.seed, static_cast<std::uint64_t>(n),
                                   static_cast<std::uint64_t>(job)));
      const long long begin = job * kJobChunk;
      const long long count = std::min(kJobChunk, config.samples - begin);
      auto& acc = partial[static_cast<std::size_t>(job)];
      EntryArray entries;
      for (long long s = 0; s < count; ++s) {
        const OrderedSpectrum lam = sampler.next();
        const std::vector<double> xi = sampler.next_direction();
        entries.fill(Entry{});
        evaluate_sample(lam, xi, entries);
        for (int c = 0; c < kLabCheckCount; ++c)
          acc[static_cast<std::size_t>(c)].add(
              entries[static_cast<std::size_t>(c)], lam, config.tolerance);
      }
    });

    for (int c = 0; c < kLabCheckCount; ++c) {
      Accumulator total;
      for (long long job = 0; job < jobs; ++job)
        total.merge(partial[static_cast<std::size_t>(job)][static_cast<std::size_t>(c)]);
      LemmaStats row;
      row.lemma = lab_check_name(static_cast<LabCheck>(c));
      row.n = n;
      row.samples = total.count;
      row.min_gap = total.count > 0 ? total.min_gap : 0.0;
      row.argmin = total.argmin;
      row.has_implied = total.has_implied;
      row.implied_max = total.has_implied ? total.implied_max : 0.0;
      row.violations = total.violations;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

void write_campaign_csv(const CampaignReport& report, const std::string& path) {
  std::string out =
      "lemma_id,n,samples,min_gap,argmin_lambda,implied_constant_max,violations\n";
  for (const auto& row : report.rows) {
    out += row.lemma;
    out += ',' + std::to_string(row.n);
    out += ',' + std::to_string(row.samples);
    out += ',';
    if (row.samples > 0) out += format_double(row.min_gap);
    out += ',' + csv_quote(format_json_array(row.argmin));
    out += ',';
    if (row.has_implied) out += format_double(row.implied_max);
    out += ',' + std::to_string(row.violations);
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace cq
