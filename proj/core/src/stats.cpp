#include "gibbslab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "gibbslab/rng.hpp"

namespace gibbslab {

double MeanVar::se() const { return n > 1 ? std::sqrt(var / n) : 0.0; }

MeanVar mean_var(std::span<const double> xs) {
  MeanVar mv;
  mv.n = xs.size();
  if (mv.n == 0) return mv;
  double s = 0.0;
  for (double x : xs) s += x;
  mv.mean = s / mv.n;
  if (mv.n > 1) {
    double q = 0.0;
    for (double x : xs) q += (x - mv.mean) * (x - mv.mean);
    mv.var = q / (mv.n - 1);
  }
  return mv;
}

double ks_distance(std::vector<double> v,
                   const std::function<double(double)>& cdf) {
  if (v.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double f = cdf(v[i]);
    d = std::max(d, std::max((i + 1) / n - f, f - i / n));
  }
  return d;
}

double exp1_cdf(double x) { return x <= 0 ? 0.0 : -std::expm1(-x); }

double ks_distance_exp1(std::vector<double> values) {
  return ks_distance(std::move(values), exp1_cdf);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks2: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() -
                              static_cast<double>(j) / b.size()));
  }
  return d;
}

double ks_critical(std::size_t n, double alpha) {
  // K(c) = 1 - 2 sum (-1)^{k-1} e^{-2 k^2 c^2}; invert by bisection
  auto tail = [](double c) {
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
      double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * c * c);
      s += term;
      if (std::fabs(term) < 1e-16) break;
    }
    return s;
  };
  double lo = 0.2, hi = 3.0;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    (tail(mid) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) / std::sqrt(static_cast<double>(n));
}

double poisson_pmf(int k, double mean) {
  if (k < 0) return 0.0;
  double lg = -mean + k * std::log(mean) - std::lgamma(k + 1.0);
  return std::exp(lg);
}

Chi2Result chi2_poisson(std::span<const int> counts, double mean,
                        double min_expected) {
  if (counts.empty()) throw std::invalid_argument("chi2: empty sample");
  int kmax = 0;
  for (int c : counts) kmax = std::max(kmax, c);
  const double n = static_cast<double>(counts.size());
  std::vector<double> expected;
  std::vector<double> observed;
  double acc_e = 0.0, acc_o = 0.0, tail_p = 1.0;
  std::vector<int> hist(kmax + 1, 0);
  for (int c : counts) ++hist[c];
  for (int k = 0; k <= kmax; ++k) {
    acc_e += n * poisson_pmf(k, mean);
    acc_o += hist[k];
    tail_p -= poisson_pmf(k, mean);
    if (acc_e >= min_expected) {
      expected.push_back(acc_e);
      observed.push_back(acc_o);
      acc_e = acc_o = 0.0;
    }
  }
  // pool everything above kmax into the final cell
  acc_e += n * std::max(tail_p, 0.0);
  if (!expected.empty()) {
    expected.back() += acc_e;
    observed.back() += acc_o;
  } else {
    expected.push_back(acc_e);
    observed.push_back(acc_o);
  }
  Chi2Result r;
  r.cells = static_cast<int>(expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    double diff = observed[i] - expected[i];
    if (expected[i] > 0) r.statistic += diff * diff / expected[i];
  }
  r.dof = std::max(r.cells - 1, 1);
  boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

Interval wilson(std::uint64_t successes, std::uint64_t trials, double conf) {
  if (trials == 0) return {0.0, 1.0};
  double z = conf >= 0.99 ? 2.5758293035489004 : 1.959963984540054;
  double nn = static_cast<double>(trials);
  double p = static_cast<double>(successes) / nn;
  double denom = 1 + z * z / nn;
  double mid = (p + z * z / (2 * nn)) / denom;
  double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
  return {std::max(0.0, mid - half), std::min(1.0, mid + half)};
}

Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials,
                         double conf) {
  if (trials == 0) return {0.0, 1.0};
  double a = (1.0 - conf) / 2.0;
  double k = static_cast<double>(successes), n = static_cast<double>(trials);
  Interval iv;
  if (successes == 0)
    iv.lo = 0.0;
  else
    iv.lo = boost::math::quantile(boost::math::beta_distribution<>(k, n - k + 1), a);
  if (successes == trials)
    iv.hi = 1.0;
  else
    iv.hi = boost::math::quantile(
        boost::math::beta_distribution<>(k + 1, n - k), 1.0 - a);
  return iv;
}

Interval bootstrap_ci(std::span<const double> values,
                      const std::function<double(std::span<const double>)>& stat,
                      int resamples, std::uint64_t seed, double conf) {
  if (values.empty()) throw std::invalid_argument("bootstrap: empty sample");
  Xoshiro256 rng(seed);
  std::vector<double> stats(resamples);
  std::vector<double> work(values.size());
  for (int b = 0; b < resamples; ++b) {
    for (auto& w : work) w = values[rng.below(values.size())];
    stats[b] = stat(work);
  }
  std::sort(stats.begin(), stats.end());
  double a = (1.0 - conf) / 2.0;
  auto pick = [&](double q) {
    double pos = q * (stats.size() - 1);
    std::size_t i = static_cast<std::size_t>(pos);
    double frac = pos - i;
    return i + 1 < stats.size() ? stats[i] * (1 - frac) + stats[i + 1] * frac
                                : stats[i];
  };
  return {pick(a), pick(1.0 - a)};
}

LinearFit weighted_linear_fit(std::span<const double> x,
                              std::span<const double> y,
                              std::span<const double> w) {
  if (x.size() != y.size() || x.size() != w.size() || x.size() < 2)
    throw std::invalid_argument("fit needs >= 2 weighted points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  LinearFit f;
  f.points = static_cast<int>(x.size());
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double pred = f.intercept + f.slope * x[i];
    ss_res += w[i] * (y[i] - pred) * (y[i] - pred);
    ss_tot += w[i] * (y[i] - my) * (y[i] - my);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  double sigma2 = x.size() > 2 ? ss_res / (x.size() - 2) : 0.0;
  f.slope_se = std::sqrt(sigma2 / sxx);
  return f;
}

}  // namespace gibbslab
