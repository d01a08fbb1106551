#include "gibbslab/thermo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gibbslab/patterns.hpp"
#include "gibbslab/stats.hpp"

namespace gibbslab {

double transfer_matrix_pressure(double coupling, int width) {
  if (width < 2 || width > 16)
    throw std::invalid_argument("transfer matrix width must be in [2,16]");
  const std::size_t dim = 1ull << width;
  const double a = std::exp(coupling), b = std::exp(-coupling);

  // symmetric similarity form D^{1/2} K D^{1/2}: D holds the intra-row
  // ring bonds, K the tensor product of 2x2 inter-row mixers
  std::vector<double> dsqrt(dim);
  const std::uint64_t mask = dim - 1;
  for (std::uint64_t s = 0; s < dim; ++s) {
    std::uint64_t rot = ((s >> 1) | (s << (width - 1))) & mask;
    int disagree = std::popcount(s ^ rot);
    dsqrt[s] = std::exp(0.5 * coupling * (width - 2 * disagree));
  }

  std::vector<double> v(dim, 1.0), w(dim);
  double lambda_prev = 0.0;
  const int max_iter = 50000;
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t s = 0; s < dim; ++s) w[s] = dsqrt[s] * v[s];
    for (int i = 0; i < width; ++i) {
      const std::size_t stride = 1ull << i;
      for (std::size_t base = 0; base < dim; base += 2 * stride)
        for (std::size_t off = 0; off < stride; ++off) {
          double v0 = w[base + off], v1 = w[base + off + stride];
          w[base + off] = a * v0 + b * v1;
          w[base + off + stride] = b * v0 + a * v1;
        }
    }
    double wv = 0.0, vv = 0.0, norm = 0.0;
    for (std::size_t s = 0; s < dim; ++s) {
      w[s] *= dsqrt[s];
      wv += w[s] * v[s];
      vv += v[s] * v[s];
      norm = std::max(norm, std::fabs(w[s]));
    }
    double lambda = wv / vv;  // Rayleigh quotient of the symmetric form
    for (std::size_t s = 0; s < dim; ++s) w[s] /= norm;
    v.swap(w);
    if (it > 2 && std::fabs(lambda - lambda_prev) <= 1e-10 * std::fabs(lambda))
      return std::log(lambda) / width;
    lambda_prev = lambda;
  }
  throw std::runtime_error("transfer-matrix power iteration did not converge");
}

double enumeration_pressure(double coupling, int side) {
  if (side < 2 || side > 5)
    throw std::invalid_argument("enumeration pressure side must be in [2,5]");
  GibbsSpec spec{{side, side}, coupling, BoundaryKind::Free, {},
                 Convention::Ferro};
  return log_partition(spec) / (static_cast<double>(side) * side);
}

double onsager_pressure(double beta) {
  double bb = std::fabs(beta);
  if (bb < 1e-14) return std::log(2.0);
  const double c = std::cosh(2 * bb) * std::cosh(2 * bb);
  const double s = std::sinh(2 * bb);
  auto inner = [&](double t) {
    double A = c - s * std::cos(t);
    return std::log(0.5 * (A + std::sqrt(A * A - s * s)));
  };
  double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      inner, 0.0, 3.14159265358979323846, 12, 1e-13);
  return std::log(2.0) + integral / (2.0 * 3.14159265358979323846);
}

double pressure(double q, double beta, PressureMethod method,
                int width_or_side) {
  const double coupling = q * beta;
  switch (method) {
    case PressureMethod::TransferMatrix:
      return transfer_matrix_pressure(coupling, width_or_side);
    case PressureMethod::Enumeration:
      return enumeration_pressure(coupling, width_or_side);
    case PressureMethod::OnsagerClosedForm:
      return onsager_pressure(coupling);
  }
  throw std::logic_error("unknown pressure method");
}

PressureCurve pressure_curve(double beta, const std::vector<double>& qs,
                             PressureMethod method, int width_or_side) {
  PressureCurve c;
  c.beta = beta;
  c.method = method;
  c.width_or_side = width_or_side;
  c.q = qs;
  c.value.reserve(qs.size());
  for (double q : qs) c.value.push_back(pressure(q, beta, method, width_or_side));
  return c;
}

double rate_function(double q, double beta, PressureMethod method,
                     int width_or_side) {
  auto p = [&](double coupling_ratio) {
    return pressure(coupling_ratio, beta, method, width_or_side);
  };
  if (q >= -1.0) return p(1.0 - q) + (q - 1.0) * p(1.0);
  return p(2.0) - 2.0 * p(1.0);
}

RateFunctionCurve rate_function_curve(double beta, const std::vector<double>& qs,
                                      PressureMethod method, int width_or_side) {
  RateFunctionCurve c;
  c.beta = beta;
  c.q = qs;
  for (double q : qs) c.value.push_back(rate_function(q, beta, method, width_or_side));
  return c;
}

namespace {

double entropy_from(double (*pf)(double, int), double beta, int width) {
  const double h = 1e-4;
  auto P = [&](double b) { return pf(b, width); };
  double d1 = (P(beta + h) - P(beta - h)) / (2 * h);
  double d2 = (P(beta + 2 * h) - P(beta - 2 * h)) / (4 * h);
  double deriv = (4.0 * d1 - d2) / 3.0;  // Richardson on the central stencil
  double s = P(beta) - beta * deriv;
  if (!(s > -1e-6 && s < std::log(2.0) + 1e-6))
    throw std::runtime_error("entropy derivative left [0, log 2]; step unstable");
  return std::clamp(s, 0.0, std::log(2.0));
}

double tm_pressure_b(double b, int width) {
  return transfer_matrix_pressure(b, width);
}
double onsager_pressure_b(double b, int width) {
  (void)width;
  return onsager_pressure(b);
}

}  // namespace

double entropy_oracle(double beta, int width) {
  return entropy_from(&tm_pressure_b, beta, width);
}

double onsager_entropy(double beta) {
  return entropy_from(&onsager_pressure_b, beta, 0);
}

namespace {

struct WindowPlan {
  int cap;        // largest cube index of the anchored sequence
  int side;       // sampled window side
  int margin;     // anchor offset
};

WindowPlan plan_window(int n, int cap) {
  WindowPlan p;
  p.margin = 12;
  p.cap = cap > 0 ? cap : std::max(4 * (n + 1), n + 9);
  p.side = p.cap + 1 + 2 * p.margin;
  return p;
}

std::string pattern_key(const Pattern& a) {
  std::string key;
  key.reserve(a.values().size());
  for (auto v : a.values()) key.push_back(v > 0 ? '+' : '-');
  return key;
}

}  // namespace

EntropyEstimate entropy_via_return(int n, double beta, int replicas,
                                   std::uint64_t seed, double eps, int cap,
                                   int calibration) {
  WindowPlan plan = plan_window(n, cap);
  GibbsSpec spec{{plan.side, plan.side}, beta, BoundaryKind::Plus, {},
                 Convention::Ferro};
  CubeSequence seq{2, {plan.margin, plan.margin, 0}};
  CubeShape cn{n, seq.anchor, 2};

  // pattern-frequency calibration for the normalizer P(sigma_{C_n});
  // beta = 0 admits the exact 2^-|C_n| instead
  const bool coins = beta == 0.0;
  std::unordered_map<std::string, int> freq;
  int calib = calibration > 0 ? calibration : std::max(4000, replicas);
  if (!coins) {
    const int cside = n + 1 + 24;
    GibbsSpec cspec{{cside, cside}, beta, BoundaryKind::Plus, {},
                    Convention::Ferro};
    CubeShape center{n, {12, 12, 0}, 2};
    for (int i = 0; i < calib; ++i) {
      HeatBathSampler s(cspec, HeatBathOptions{},
                        derive_seed(seed, 0x43414c49ull, i));
      freq[pattern_key(Pattern::from_window(s.sample_one(), center))]++;
    }
  }

  std::vector<double> logs;
  std::size_t censored = 0, in_bracket = 0, resolved = 0;
  const double lo = -eps * std::log(static_cast<double>(n));
  const double hi = std::log(eps * std::log(static_cast<double>(n)));
  for (int i = 0; i < replicas; ++i) {
    HeatBathSampler s(spec, HeatBathOptions{},
                      derive_seed(seed, 0x52455455ull, i));
    SpinConfig cfg = s.sample_one();
    Pattern a = Pattern::from_window(cfg, cn);
    TimeRecord rec = return_time(a, cfg, seq, plan.cap);
    if (rec.censored) {
      ++censored;
      continue;
    }
    double logR = std::log(static_cast<double>(rec.value));
    logs.push_back(logR / std::pow(static_cast<double>(n), 2.0));
    double p_hat = 0.0;
    if (coins) {
      p_hat = std::ldexp(1.0, -static_cast<int>(a.size()));
    } else {
      auto it = freq.find(pattern_key(a));
      if (it == freq.end() || it->second < 10) continue;  // unresolved
      p_hat = static_cast<double>(it->second) / calib;
    }
    ++resolved;
    double z = logR + std::log(p_hat);
    if (z >= lo && z <= hi) ++in_bracket;
  }

  EntropyEstimate est;
  est.n = n;
  est.samples = replicas;
  est.censored_fraction = static_cast<double>(censored) / replicas;
  est.inconclusive = est.censored_fraction > 0.5;
  MeanVar mv = mean_var(logs);
  est.value = mv.mean;
  est.se = mv.se();
  std::size_t kept = replicas - censored;
  est.bracket_fraction = resolved ? static_cast<double>(in_bracket) / resolved : 0.0;
  est.bracket_excluded =
      kept ? 1.0 - static_cast<double>(resolved) / kept : 1.0;
  est.extras["eps"] = eps;
  return est;
}

double waiting_exponent_target(WaitingLaw q_law, double bernoulli_p,
                               double beta, int width) {
  switch (q_law) {
    case WaitingLaw::SameP:
    case WaitingLaw::MinusPhase:
      // relative entropy density between the two phases of one potential
      // vanishes; both laws share the exponent s(P)
      return entropy_oracle(beta, width);
    case WaitingLaw::Bernoulli: {
      // s(Q) + s(Q|P) = P(beta) - 2 beta (2p-1)^2 for an iid field
      double m = 2.0 * bernoulli_p - 1.0;
      return transfer_matrix_pressure(beta, width) - 2.0 * beta * m * m;
    }
  }
  throw std::logic_error("unknown waiting law");
}

EntropyEstimate entropy_via_waiting(WaitingLaw q_law, double bernoulli_p,
                                    int n, double beta, int replicas,
                                    std::uint64_t seed, int cap) {
  WindowPlan plan = plan_window(n, cap);
  GibbsSpec sigma_spec{{plan.side, plan.side}, beta, BoundaryKind::Plus, {},
                       Convention::Ferro};
  CubeSequence seq{2, {plan.margin, plan.margin, 0}};

  const int eta_side = n + 1 + 24;
  GibbsSpec eta_spec{{eta_side, eta_side}, beta,
                     q_law == WaitingLaw::MinusPhase ? BoundaryKind::Minus
                                                     : BoundaryKind::Plus,
                     {},
                     Convention::Ferro};
  CubeShape eta_center{n, {12, 12, 0}, 2};

  std::vector<double> logs;
  std::size_t censored = 0;
  for (int i = 0; i < replicas; ++i) {
    Pattern target = [&] {
      if (q_law == WaitingLaw::Bernoulli) {
        Xoshiro256 rng(derive_seed(seed, 0x57424552ull, i));
        std::vector<std::int8_t> field(static_cast<std::size_t>(n + 1) * (n + 1));
        for (auto& f : field)
          f = rng.uniform() < bernoulli_p ? +1 : -1;
        SpinConfig eta = SpinConfig::from_field(
            {n + 1, n + 1}, field, BoundaryKind::Free);
        return Pattern::from_window(eta, CubeShape{n, {0, 0, 0}, 2})
            .shifted(seq.anchor);
      }
      HeatBathSampler s(eta_spec,
                        HeatBathOptions{q_law == WaitingLaw::MinusPhase ? 400 : 200, 8},
                        derive_seed(seed, 0x57455441ull, i));
      if (q_law == WaitingLaw::MinusPhase) {
        // start in the minus ground state so the burn-in stays in phase
        for (int y = 0; y < s.field().height(); ++y)
          for (int x = 0; x < s.field().width(); ++x) s.field().set_spin(x, y, -1);
      }
      return Pattern::from_window(s.sample_one(), eta_center)
          .shifted(seq.anchor - Site{12, 12, 0});
    }();
    HeatBathSampler s(sigma_spec, HeatBathOptions{},
                      derive_seed(seed, 0x57414954ull, i));
    SpinConfig sigma = s.sample_one();
    TimeRecord rec = occurrence_time(target, sigma, seq, plan.cap);
    if (rec.censored) {
      ++censored;
      continue;
    }
    logs.push_back(std::log(static_cast<double>(rec.value)) /
                   std::pow(static_cast<double>(n), 2.0));
  }

  EntropyEstimate est;
  est.n = n;
  est.samples = replicas;
  est.censored_fraction = static_cast<double>(censored) / replicas;
  est.inconclusive = est.censored_fraction > 0.5;
  MeanVar mv = mean_var(logs);
  est.value = mv.mean;
  est.se = mv.se();
  return est;
}

EntropyEstimate matching_exponent(int n, double beta, int pairs,
                                  std::uint64_t seed, int cap) {
  WindowPlan plan = plan_window(n, cap);
  GibbsSpec spec{{plan.side, plan.side}, beta, BoundaryKind::Plus, {},
                 Convention::Ferro};
  CubeSequence seq{2, {plan.margin, plan.margin, 0}};
  std::vector<double> logs;
  std::size_t censored = 0;
  for (int i = 0; i < pairs; ++i) {
    SpinConfig sigma = [&] {
      if (beta == 0.0) {
        Xoshiro256 rng(derive_seed(seed, 0x4d415431ull, i));
        std::vector<std::int8_t> f(spec.site_count());
        for (auto& x : f) x = rng.uniform() < 0.5 ? +1 : -1;
        return SpinConfig::from_field(spec.extent, f, BoundaryKind::Free);
      }
      HeatBathSampler s(spec, HeatBathOptions{},
                        derive_seed(seed, 0x4d415431ull, i));
      return s.sample_one();
    }();
    SpinConfig eta = [&] {
      if (beta == 0.0) {
        Xoshiro256 rng(derive_seed(seed, 0x4d415432ull, i));
        std::vector<std::int8_t> f(spec.site_count());
        for (auto& x : f) x = rng.uniform() < 0.5 ? +1 : -1;
        return SpinConfig::from_field(spec.extent, f, BoundaryKind::Free);
      }
      HeatBathSampler s(spec, HeatBathOptions{},
                        derive_seed(seed, 0x4d415432ull, i));
      return s.sample_one();
    }();
    TimeRecord rec = matching_time(sigma, eta, n, seq, plan.cap);
    if (rec.censored) {
      ++censored;
      continue;
    }
    logs.push_back(std::log(static_cast<double>(rec.value)) /
                   std::pow(static_cast<double>(n), 2.0));
  }
  EntropyEstimate est;
  est.n = n;
  est.samples = pairs;
  est.censored_fraction = static_cast<double>(censored) / pairs;
  est.inconclusive = est.censored_fraction > 0.5;
  MeanVar mv = mean_var(logs);
  est.value = mv.mean;
  est.se = mv.se();
  return est;
}

double collision_entropy_target(int n, double beta, int width) {
  const double nd = std::pow(static_cast<double>(n), 2.0);
  if (beta == 0.0)
    return std::pow(n + 1.0, 2.0) * std::log(2.0) / nd;
  if (static_cast<std::uint64_t>(n + 1) * (n + 1) <= kEnumerationCap) {
    GibbsSpec spec{{n + 1, n + 1}, beta, BoundaryKind::Plus, {},
                   Convention::Ferro};
    return -log_collision_sum(spec) / nd;
  }
  // anchor the volume coefficient at its pressure limit and fit the
  // surface and constant terms on the enumerable sizes
  double a = 2.0 * transfer_matrix_pressure(beta, width) -
             transfer_matrix_pressure(2.0 * beta, width);
  std::vector<double> x, y, w;
  for (int m = 2; m <= 4; ++m) {
    GibbsSpec spec{{m + 1, m + 1}, beta, BoundaryKind::Plus, {},
                   Convention::Ferro};
    double side = m + 1.0;
    x.push_back(side);
    y.push_back(-log_collision_sum(spec) - a * side * side);
    w.push_back(1.0);
  }
  LinearFit fit = weighted_linear_fit(x, y, w);
  double side = n + 1.0;
  return (a * side * side + fit.slope * side + fit.intercept) / nd;
}

}  // namespace gibbslab
