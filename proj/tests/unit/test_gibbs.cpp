#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gibbslab/gibbs.hpp"
#include "gibbslab/patterns.hpp"
#include "support/oracles.hpp"

using namespace gibbslab;

namespace {

// independently coded Boltzmann summation: explicit site loops, no bit
// tricks, used as the enumeration oracle
double naive_weight(const GibbsSpec& spec, std::uint64_t cfg) {
  const int W = spec.extent[0], H = spec.extent[1];
  auto spin = [&](int x, int y) {
    return (cfg >> (y * W + x)) & 1u ? +1.0 : -1.0;
  };
  auto outside = [&](int) {
    return spec.boundary == BoundaryKind::Plus    ? 1.0
           : spec.boundary == BoundaryKind::Minus ? -1.0
                                                  : 0.0;
  };
  double e = 0.0;
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      if (x + 1 < W) e += spin(x, y) * spin(x + 1, y);
      if (y + 1 < H) e += spin(x, y) * spin(x, y + 1);
      if (x == 0) e += spin(x, y) * outside(0);
      if (x == W - 1) e += spin(x, y) * outside(0);
      if (y == 0) e += spin(x, y) * outside(0);
      if (y == H - 1) e += spin(x, y) * outside(0);
    }
  double sign = spec.convention == Convention::Ferro ? 1.0 : -1.0;
  return std::exp(sign * spec.beta * e);
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::fabs(a[i] - b[i]);
  return 0.5 * tv;
}

}  // namespace

TEST_CASE("heat bath single-site conditional") {
  CHECK(heat_bath_flip_probability(0.7, 0) == doctest::Approx(0.5));
  CHECK(heat_bath_flip_probability(0.0, 3) == doctest::Approx(0.5));
  double e4 = std::exp(4.0), em4 = std::exp(-4.0);
  CHECK(heat_bath_flip_probability(1.0, 4) == doctest::Approx(e4 / (e4 + em4)));
  // monotone in the neighbor sum
  for (int h = -4; h < 4; ++h)
    CHECK(heat_bath_flip_probability(0.8, h) <
          heat_bath_flip_probability(0.8, h + 1));
  // literal convention flips the monotonicity
  CHECK(heat_bath_flip_probability(0.8, 2, Convention::Literal) <
        heat_bath_flip_probability(0.8, -2, Convention::Literal));
}

TEST_CASE("beta zero enumeration is uniform") {
  GibbsSpec spec{{2, 2}, 0.0, BoundaryKind::Free, {}, Convention::Ferro};
  ExactDistribution dist = exact_distribution(spec);
  REQUIRE(dist.prob.size() == 16);
  for (double p : dist.prob) CHECK(p == doctest::Approx(1.0 / 16).epsilon(1e-12));
}

TEST_CASE("ground state dominance at large beta") {
  GibbsSpec spec{{2, 2}, 10.0, BoundaryKind::Plus, {}, Convention::Ferro};
  ExactDistribution dist = exact_distribution(spec);
  CHECK(dist.prob[15] > 0.999);
}

TEST_CASE("enumeration agrees with the naive Boltzmann sum") {
  for (Convention conv : {Convention::Ferro, Convention::Literal}) {
    GibbsSpec spec{{3, 3}, 0.5, BoundaryKind::Plus, {}, conv};
    ExactDistribution dist = exact_distribution(spec);
    REQUIRE(dist.prob.size() == 512);
    long double z = 0.0;
    for (std::uint64_t cfg = 0; cfg < 512; ++cfg) z += naive_weight(spec, cfg);
    double sum = 0.0;
    for (std::uint64_t cfg = 0; cfg < 512; ++cfg) {
      double expect = static_cast<double>(naive_weight(spec, cfg) / z);
      CHECK(dist.prob[cfg] == doctest::Approx(expect).epsilon(1e-10));
      sum += dist.prob[cfg];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("enumeration cap is enforced") {
  GibbsSpec spec{{6, 5}, 0.5, BoundaryKind::Plus, {}, Convention::Ferro};
  CHECK_THROWS(exact_distribution(spec));
}

TEST_CASE("detailed balance of the heat-bath kernel") {
  GibbsSpec spec{{3, 3}, 0.7, BoundaryKind::Plus, {}, Convention::Ferro};
  ExactDistribution dist = exact_distribution(spec);
  // single-flip pairs: pi(s) k(s->s') = pi(s') k(s'->s), with k the
  // conditional of the flipped site given its environment
  for (std::uint64_t cfg = 0; cfg < 512; ++cfg)
    for (int site = 0; site < 9; ++site) {
      std::uint64_t other = cfg ^ (1ull << site);
      int x = site % 3, y = site / 3;
      SpinConfig sc = dist.config_from_index(cfg, spec.boundary);
      int h = 0;
      for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        int nx = x + dx, ny = y + dy;
        h += (nx < 0 || nx > 2 || ny < 0 || ny > 2) ? 1 : sc.spin(nx, ny);
      }
      double p_plus = heat_bath_flip_probability(spec.beta, h);
      double k_fwd = (other >> site) & 1u ? p_plus : 1 - p_plus;
      double k_bwd = (cfg >> site) & 1u ? p_plus : 1 - p_plus;
      REQUIRE(dist.prob[cfg] * k_fwd ==
              doctest::Approx(dist.prob[other] * k_bwd).epsilon(1e-12));
    }
}

TEST_CASE("plus boundary stochastically dominates minus") {
  GibbsSpec plus{{3, 3}, 0.6, BoundaryKind::Plus, {}, Convention::Ferro};
  GibbsSpec minus{{3, 3}, 0.6, BoundaryKind::Minus, {}, Convention::Ferro};
  ExactDistribution dp = exact_distribution(plus);
  ExactDistribution dm = exact_distribution(minus);
  for (int site = 0; site < 9; ++site)
    CHECK(dp.plus_marginal(site) > dm.plus_marginal(site));
}

TEST_CASE("uniform pattern-probability bound on the 3x3 window") {
  GibbsSpec spec{{3, 3}, 0.5, BoundaryKind::Plus, {}, Convention::Ferro};
  ExactDistribution dist = exact_distribution(spec);
  double pmax = 0.0;
  for (double p : dist.prob) pmax = std::max(pmax, p);
  double delta = -std::log(pmax) / 9.0;
  CHECK(delta > 0.0);
  MESSAGE("realized uniform-bound delta = ", delta);
}

TEST_CASE("cftp draws match the exact law on a 3x3 window") {
  for (double beta : {0.4, 1.0}) {
    GibbsSpec spec{{3, 3}, beta, BoundaryKind::Plus, {}, Convention::Ferro};
    ExactDistribution dist = exact_distribution(spec);
    CftpOptions opt;
    opt.check_sandwich = true;
    CftpSampler sampler(spec, opt, 20240 + static_cast<int>(10 * beta));
    const int draws = 20000;
    std::vector<double> freq(512, 0.0);
    for (int i = 0; i < draws; ++i) {
      SpinConfig cfg = sampler.sample().config;
      std::uint64_t idx = 0;
      for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x)
          if (cfg.spin(x, y) > 0) idx |= 1ull << (y * 3 + x);
      freq[idx] += 1.0 / draws;
    }
    double tv = total_variation(freq, dist.prob);
    MESSAGE("beta=", beta, " cftp tv=", tv);
    CHECK(tv < 0.02);
  }
}

TEST_CASE("beta zero sampling gives fair coins") {
  GibbsSpec spec{{6, 6}, 0.0, BoundaryKind::Plus, {}, Convention::Ferro};
  HeatBathSampler sampler(spec, HeatBathOptions{50, 2}, 99);
  auto configs = sampler.sample(400);
  double mean = 0.0;
  for (const auto& cfg : configs)
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 6; ++x) mean += cfg.spin(x, y);
  mean /= 400.0 * 36.0;
  CHECK(std::fabs(mean) < 3.0 / std::sqrt(400.0 * 36.0 / 3.0));
}

TEST_CASE("low-temperature plus phase magnetization") {
  GibbsSpec spec{{64, 64}, 1.0, BoundaryKind::Plus, {}, Convention::Ferro};
  HeatBathSampler sampler(spec, HeatBathOptions{}, 7);
  SpinConfig cfg = sampler.sample_one();
  double m = 0.0;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) m += cfg.spin(x, y);
  m /= 64.0 * 64.0;
  CHECK(m > 0.99);
}

TEST_CASE("heat bath marginals against cftp on 16x16") {
  GibbsSpec spec{{16, 16}, 0.6, BoundaryKind::Plus, {}, Convention::Ferro};
  double hb = 0.0, pw = 0.0;
  const int reps = 300;
  for (int i = 0; i < reps; ++i) {
    HeatBathSampler s(spec, HeatBathOptions{}, derive_seed(5, 1, i));
    hb += s.sample_one().spin(8, 8);
    CftpSampler c(spec, CftpOptions{}, derive_seed(5, 2, i));
    pw += c.sample().config.spin(8, 8);
  }
  hb /= reps;
  pw /= reps;
  CHECK(std::fabs(hb - pw) < 0.08);  // ~3 binomial sigma at 300 draws
}

TEST_CASE("conditional sampling freezes the pattern and matches enumeration") {
  // freeze all of a 3x3 volume: one deterministic configuration
  GibbsSpec spec{{3, 3}, 0.8, BoundaryKind::Plus, {}, Convention::Ferro};
  Pattern full = Pattern::from_rows({"+-+", "--+", "+++"});
  auto one = conditional_sample(spec, full, 3, 11);
  for (const auto& cfg : one)
    for (std::size_t i = 0; i < full.support().size(); ++i)
      CHECK(cfg.spin(full.support()[i]) == full.values()[i]);

  // 4x4 volume, frozen 2x2 block: relative frequencies of the free spins
  // match the exact conditional distribution
  GibbsSpec spec4{{4, 4}, 0.5, BoundaryKind::Plus, {}, Convention::Ferro};
  Pattern corner = Pattern::cube_constant(1, +1);
  std::vector<std::int8_t> frozen(16, 0);
  frozen[0] = frozen[1] = frozen[4] = frozen[5] = +1;
  ExactDistribution cond = exact_conditional_distribution(spec4, frozen);

  const int draws = 30000;
  std::vector<double> freq(1ull << 16, 0.0);
  auto samples = conditional_sample(spec4, corner, draws, 31,
                                    HeatBathOptions{60, 1});
  for (const auto& cfg : samples) {
    std::uint64_t idx = 0;
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x)
        if (cfg.spin(x, y) > 0) idx |= 1ull << (y * 4 + x);
    freq[idx] += 1.0 / draws;
  }
  double tv = total_variation(freq, cond.prob);
  MESSAGE("conditional tv = ", tv);
  CHECK(tv < 0.05);

  // support outside the volume errors out
  Pattern outside = corner.shifted({3, 3, 0});
  CHECK_THROWS(conditional_sample(spec, outside, 1, 1));
}

TEST_CASE("beta zero conditional sampling leaves the complement uniform") {
  GibbsSpec spec{{3, 3}, 0.0, BoundaryKind::Free, {}, Convention::Ferro};
  Pattern site = Pattern::from_rows({"+"});
  auto samples = conditional_sample(spec, site, 4000, 17, HeatBathOptions{30, 1});
  double mean = 0.0;
  for (const auto& cfg : samples) mean += cfg.spin(2, 2);
  CHECK(std::fabs(mean / 4000.0) < 0.05);
}
