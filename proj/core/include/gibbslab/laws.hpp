#pragma once

#include <map>
#include <optional>
#include <string>

#include "gibbslab/patterns.hpp"
#include "gibbslab/stats.hpp"

namespace gibbslab {

struct RateEstimate {
  std::string pattern_id;
  double lambda_hat = 0.0;
  Interval lambda_ci{0.0, 0.0};  // bootstrap 95%, widened by the P(A) error
  double t_used = 0.0;           // survival threshold, volume units
  double p_a = 0.0;              // normalizer P(A)
  double p_a_se = 0.0;
  bool p_exact = false;          // enumeration vs Monte Carlo provenance
  std::size_t samples = 0;
  double censored_fraction = 0.0;
  bool lemma_regime = true;      // t * P(A) <= 1/2
  double survival = 0.0;         // P(T > t) estimate behind lambda_hat
};

// lambda_{A,t} = -log P(T_A > t) / (t P(A)) at t = floor(1/(2 P)) by
// default (the largest threshold inside the proven regime). For patterns
// so likely that no integer t fits the regime, falls back to the first
// informative volume (the support volume) and clears lemma_regime.
RateEstimate estimate_lambda(std::span<const TimeRecord> occurrence_records,
                             double p_a, double p_a_se, bool p_exact,
                             std::uint64_t seed,
                             std::optional<double> t_override = std::nullopt,
                             std::uint64_t min_volume = 0);

struct LawReport {
  std::string law;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  int n = 0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::size_t sample_size = 0;
  double censored_fraction = 0.0;
  std::map<std::string, double> extras;
};

// KS distance of lambda * P(A) * value against Exp(1) over the uncensored
// records. threshold <= 0 picks the asymptotic 1% critical value.
LawReport exponential_law_test(std::span<const TimeRecord> records,
                               const RateEstimate& rate,
                               double threshold = 0.0,
                               std::size_t min_uncensored = 500);

// Dispersion and chi-square verdicts for occurrence counts against
// Poisson(t_eff); the window rounding enters through t_eff.
LawReport poisson_count_report(std::span<const int> counts, double t_eff,
                               double dispersion_lo, double dispersion_hi,
                               double chi2_level = 0.01);

// P(tau^2 >= s/P, tau^1 <= t/P) against (1 - e^{-lambda t}) e^{-lambda s}
// from per-replica first and second occurrence volumes.
LawReport increment_report(std::span<const TimeRecord> first,
                           std::span<const TimeRecord> second,
                           const RateEstimate& rate, double t, double s,
                           double tolerance);

struct GumbelCurvePoint {
  int x = 0;
  double empirical = 0.0;
  double lower = 0.0, upper = 0.0;  // bracket before the sampling slack
  double se = 0.0;
};

struct GumbelBracket {
  LawReport report;
  std::vector<GumbelCurvePoint> curve;
  double nu_hat = 0.0, nu_prime_hat = 0.0;  // -log of min/max tail ratios
  double theta_hat = 1.0;                   // first-order declustering
  std::uint64_t u_n = 0;
};

// Double-exponential bracket for P(M_n <= u_n + x) built from the f(k)
// tail ratios and the exact translate counts m_n(k), checked against the
// empirical overlap CDF at integer x in [x_lo, x_hi] within 3 binomial SE.
GumbelBracket gumbel_bracket(std::span<const TimeRecord> overlap_records,
                             const OverlapThresholds& thresholds,
                             const NestedShapes& shapes, int n, int x_lo = -3,
                             int x_hi = 6);

}  // namespace gibbslab
