#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace gibbslab {

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // unbiased
  std::size_t n = 0;
  double se() const;
};

MeanVar mean_var(std::span<const double> xs);

// sup |F_hat - F| against a continuous CDF
double ks_distance(std::vector<double> sorted_or_not,
                   const std::function<double(double)>& cdf);
double ks_distance_exp1(std::vector<double> values);  // F(x) = 1 - e^-x
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// asymptotic one-sample critical value c(alpha)/sqrt(n); c(0.01) = 1.628
double ks_critical(std::size_t n, double alpha);

double exp1_cdf(double x);
double poisson_pmf(int k, double mean);

struct Chi2Result {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int cells = 0;
};

// goodness of fit of integer counts against Poisson(mean); tail cells pooled
// until every expected count reaches min_expected
Chi2Result chi2_poisson(std::span<const int> counts, double mean,
                        double min_expected = 5.0);

struct Interval {
  double lo = 0.0, hi = 1.0;
};

Interval wilson(std::uint64_t successes, std::uint64_t trials,
                double conf = 0.95);
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials,
                         double conf = 0.95);

// percentile bootstrap over a replica-indexed sample
Interval bootstrap_ci(std::span<const double> values,
                      const std::function<double(std::span<const double>)>& stat,
                      int resamples, std::uint64_t seed, double conf = 0.95);

struct LinearFit {
  double slope = 0.0, intercept = 0.0;
  double slope_se = 0.0;
  double r2 = 0.0;
  int points = 0;
};

// weighted least squares y = intercept + slope * x
LinearFit weighted_linear_fit(std::span<const double> x,
                              std::span<const double> y,
                              std::span<const double> w);

}  // namespace gibbslab
