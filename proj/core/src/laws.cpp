#include "gibbslab/laws.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace gibbslab {

namespace {

double survival_at(std::span<const TimeRecord> records, double t,
                   std::size_t& usable) {
  std::size_t above = 0;
  usable = 0;
  for (const TimeRecord& r : records) {
    if (r.censored && static_cast<double>(r.window_cap) < t) continue;  // uninformative at t
    ++usable;
    double v = static_cast<double>(r.value);
    if (v > t) ++above;
  }
  if (usable == 0) throw std::runtime_error("no record informs survival at t");
  return static_cast<double>(above) / static_cast<double>(usable);
}

}  // namespace

RateEstimate estimate_lambda(std::span<const TimeRecord> records, double p_a,
                             double p_a_se, bool p_exact, std::uint64_t seed,
                             std::optional<double> t_override,
                             std::uint64_t min_volume) {
  if (records.empty()) throw std::invalid_argument("estimate_lambda: no records");
  if (!(p_a > 0.0))
    throw std::invalid_argument("estimate_lambda: normalizer must be positive");
  if (p_a_se > 0 && p_a - 1.96 * p_a_se <= 0.0)
    throw std::invalid_argument("estimate_lambda: P(A) CI spans zero");

  RateEstimate est;
  est.p_a = p_a;
  est.p_a_se = p_a_se;
  est.p_exact = p_exact;
  est.samples = records.size();
  std::size_t censored = 0;
  for (const TimeRecord& r : records) censored += r.censored;
  est.censored_fraction = static_cast<double>(censored) / records.size();

  double t = t_override.value_or(std::floor(1.0 / (2.0 * p_a)));
  est.lemma_regime = t * p_a <= 0.5 + 1e-12 && t >= 1.0;
  if (t < 1.0 || (min_volume > 0 && t < static_cast<double>(min_volume))) {
    // concentrated pattern: no integer threshold fits the proven regime;
    // use the first volume at which the survival is informative
    t = static_cast<double>(min_volume > 0 ? min_volume : 1);
    est.lemma_regime = false;
  }
  est.t_used = t;

  std::size_t usable = 0;
  double s = survival_at(records, t, usable);
  est.survival = s;
  if (s <= 0.0)
    throw std::runtime_error("all usable records fall at or below t");
  est.lambda_hat = -std::log(s) / (t * p_a);

  // bootstrap over records, then widen multiplicatively by the P(A) error
  std::vector<double> vals;
  vals.reserve(records.size());
  for (const TimeRecord& r : records) {
    if (r.censored && static_cast<double>(r.window_cap) < t) continue;
    vals.push_back(static_cast<double>(r.value));
  }
  auto stat = [t, p_a](std::span<const double> xs) {
    std::size_t above = 0;
    for (double v : xs) above += v > t;
    double sv = std::max(static_cast<double>(above) / xs.size(), 0.5 / xs.size());
    return -std::log(sv) / (t * p_a);
  };
  est.lambda_ci = bootstrap_ci(vals, stat, 400, seed ^ 0x4c414d42ull);
  if (p_a_se > 0) {
    double rel = 1.96 * p_a_se / p_a;
    est.lambda_ci.lo /= (1.0 + rel);
    est.lambda_ci.hi /= std::max(1.0 - rel, 1e-9);
  }
  return est;
}

LawReport exponential_law_test(std::span<const TimeRecord> records,
                               const RateEstimate& rate, double threshold,
                               std::size_t min_uncensored) {
  if (!(rate.lambda_hat > 0) || !std::isfinite(rate.lambda_hat) ||
      !(rate.p_a > 0) || !std::isfinite(rate.p_a))
    throw std::invalid_argument("exponential_law_test: bad normalizer");
  std::vector<double> rescaled;
  std::size_t censored = 0;
  for (const TimeRecord& r : records) {
    if (r.censored) {
      ++censored;
      continue;
    }
    rescaled.push_back(rate.lambda_hat * rate.p_a * static_cast<double>(r.value));
  }
  if (rescaled.size() < min_uncensored)
    throw std::runtime_error("exponential_law_test: too few uncensored records");

  LawReport rep;
  rep.sample_size = rescaled.size();
  rep.censored_fraction =
      records.empty() ? 0.0 : static_cast<double>(censored) / records.size();
  MeanVar mv = mean_var(rescaled);
  rep.extras["rescaled_mean"] = mv.mean;
  rep.extras["rescaled_mean_se"] = mv.se();
  rep.statistic = ks_distance_exp1(std::move(rescaled));
  rep.threshold = threshold > 0 ? threshold : ks_critical(rep.sample_size, 0.01);
  rep.pass = rep.statistic <= rep.threshold;
  if (rep.censored_fraction > 0.10) {
    rep.extras["inconclusive"] = 1.0;
    rep.pass = false;
  }
  rep.law = "exponential";
  return rep;
}

LawReport poisson_count_report(std::span<const int> counts, double t_eff,
                               double dispersion_lo, double dispersion_hi,
                               double chi2_level) {
  if (counts.empty()) throw std::invalid_argument("poisson: no counts");
  std::vector<double> xs(counts.begin(), counts.end());
  MeanVar mv = mean_var(xs);
  LawReport rep;
  rep.law = "poisson";
  rep.sample_size = counts.size();
  double dispersion = mv.mean > 0 ? mv.var / mv.mean : 0.0;
  Chi2Result chi = chi2_poisson(counts, t_eff);
  rep.statistic = dispersion;
  rep.threshold = dispersion_hi;
  rep.extras["dispersion"] = dispersion;
  rep.extras["mean"] = mv.mean;
  rep.extras["t_eff"] = t_eff;
  rep.extras["chi2"] = chi.statistic;
  rep.extras["chi2_dof"] = chi.dof;
  rep.extras["chi2_p"] = chi.p_value;
  rep.pass = dispersion >= dispersion_lo && dispersion <= dispersion_hi &&
             chi.p_value >= chi2_level;
  return rep;
}

LawReport increment_report(std::span<const TimeRecord> first,
                           std::span<const TimeRecord> second,
                           const RateEstimate& rate, double t, double s,
                           double tolerance) {
  if (first.size() != second.size() || first.empty())
    throw std::invalid_argument("increment_report: need paired records");
  const double unit = 1.0 / rate.p_a;  // thresholds live on the 1/P(A) scale
  std::size_t hit = 0, usable = 0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (second[i].censored &&
        static_cast<double>(second[i].window_cap) < t * unit + s * unit)
      continue;
    ++usable;
    double t1 = static_cast<double>(first[i].value);
    double tau2 = static_cast<double>(second[i].value) - t1;
    if (t1 <= t * unit && tau2 >= s * unit) ++hit;
  }
  if (usable == 0) throw std::runtime_error("increment_report: no usable pairs");
  double p_hat = static_cast<double>(hit) / usable;
  double target =
      -std::expm1(-rate.lambda_hat * t) * std::exp(-rate.lambda_hat * s);
  LawReport rep;
  rep.law = "increments";
  rep.sample_size = usable;
  rep.statistic = std::fabs(p_hat - target);
  rep.threshold = tolerance;
  rep.extras["p_hat"] = p_hat;
  rep.extras["target"] = target;
  rep.extras["se"] = std::sqrt(std::max(p_hat * (1 - p_hat), 1e-12) / usable);
  rep.pass = rep.statistic <= tolerance;
  return rep;
}

namespace {

// sites of G_k + e outside G_k; small k, direct set arithmetic
int shifted_new_sites(const NestedShapes& shapes, int k, const Site& e) {
  auto pref = shapes.prefix(k);
  std::unordered_set<Site, SiteHash> in(pref.begin(), pref.end());
  int fresh = 0;
  for (const Site& s : pref)
    if (!in.count(s + e)) ++fresh;
  return fresh;
}

}  // namespace

GumbelBracket gumbel_bracket(std::span<const TimeRecord> overlap_records,
                             const OverlapThresholds& thresholds,
                             const NestedShapes& shapes, int n, int x_lo,
                             int x_hi) {
  if (overlap_records.empty())
    throw std::invalid_argument("gumbel_bracket: no overlap records");
  if (thresholds.u.size() <= static_cast<std::size_t>(n))
    throw std::invalid_argument("gumbel_bracket: thresholds too short");
  GumbelBracket out;
  const std::uint64_t u = thresholds.u[n];
  out.u_n = u;

  // tail ratios of f around u_n give the liminf/limsup rate bracket
  const int resolved = thresholds.resolved_k;
  int k_from = std::max<int>(1, static_cast<int>(u) - 4);
  int k_to = std::min<int>(resolved - 1, static_cast<int>(u) + 8);
  double r_min = 1.0, r_max = 0.0;
  for (int k = k_from; k <= k_to; ++k) {
    if (thresholds.f[k] <= 0 || thresholds.f[k + 1] <= 0) break;
    double r = thresholds.f[k + 1] / thresholds.f[k];
    r_min = std::min(r_min, r);
    r_max = std::max(r_max, r);
  }
  if (!(r_max > 0))
    throw std::runtime_error("gumbel_bracket: tail ratios unresolved");
  out.nu_hat = -std::log(r_min);
  out.nu_prime_hat = -std::log(r_max);

  // first-order clump correction at the pivot scale
  int k0 = std::min<int>(std::max<int>(static_cast<int>(u) + 1, 2), n);
  double clump = 0.0;
  for (int dx = -1; dx <= 1; ++dx)
    for (int dy = -1; dy <= 1; ++dy) {
      if (dx == 0 && dy == 0) continue;
      clump += std::pow(r_max, shifted_new_sites(shapes, k0, {dx, dy, 0}));
    }
  out.theta_hat = 1.0 / (1.0 + clump);

  // model intensity mu(k) = m_n(k) f(k); f extended by ratio powers past
  // the resolved range (m_n is exact geometry, zero for k > n)
  std::vector<std::uint64_t> m = shapes.fit_counts(n);
  auto f_bound = [&](int k, double ratio) {
    if (k <= 0) return 1.0;
    if (k <= resolved) return thresholds.f[k];
    return thresholds.f[resolved] * std::pow(ratio, k - resolved);
  };
  auto mu = [&](int k, double ratio) {
    if (k <= 0) return 1e300;  // CDF at negative overlap is 0
    if (k > n) return 0.0;
    return static_cast<double>(m[k]) * f_bound(k, ratio);
  };

  const double N = static_cast<double>(overlap_records.size());
  LawReport& rep = out.report;
  rep.law = "gumbel";
  rep.n = n;
  rep.sample_size = overlap_records.size();
  rep.threshold = 0.0;
  rep.pass = true;
  double worst = 0.0;
  for (int x = x_lo; x <= x_hi; ++x) {
    GumbelCurvePoint pt;
    pt.x = x;
    const long long level = static_cast<long long>(u) + x;
    std::size_t cnt = 0;
    for (const TimeRecord& r : overlap_records)
      if (static_cast<long long>(r.value) <= level) ++cnt;
    pt.empirical = cnt / N;
    int k = static_cast<int>(u) + x + 1;
    pt.lower = std::exp(-mu(k, r_max));
    pt.upper = std::exp(-out.theta_hat * mu(k, r_min));
    double p = std::clamp(pt.empirical, 1.0 / (N + 1), N / (N + 1));
    pt.se = std::sqrt(p * (1 - p) / N);
    double lo = pt.lower - 3 * pt.se, hi = pt.upper + 3 * pt.se;
    double violation = std::max({0.0, lo - pt.empirical, pt.empirical - hi});
    worst = std::max(worst, violation);
    out.curve.push_back(pt);
  }
  rep.statistic = worst;
  rep.pass = worst <= 0.0;
  rep.extras["nu_hat"] = out.nu_hat;
  rep.extras["nu_prime_hat"] = out.nu_prime_hat;
  rep.extras["theta_hat"] = out.theta_hat;
  rep.extras["u_n"] = static_cast<double>(u);
  return out;
}

}  // namespace gibbslab
