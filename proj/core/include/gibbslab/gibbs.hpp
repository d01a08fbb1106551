#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gibbslab/lattice.hpp"
#include "gibbslab/rng.hpp"

namespace gibbslab {

class Pattern;

// Sign convention for the finite-volume weight.
//   Ferro:   w(s) = exp(+b sum_<xy> s_x s_y + b sum_boundary s_x eta_y)
//   Literal: the same with both signs flipped (the printed form of the
//            finite-volume measure, which rewards disagreement).
// All plus-phase phenomenology requires Ferro; Literal is kept behind this
// switch for fidelity audits.
enum class Convention : std::uint8_t { Ferro, Literal };

struct GibbsSpec {
  std::vector<int> extent;  // d=2 rectangular volume
  double beta = 1.0;
  BoundaryKind boundary = BoundaryKind::Plus;
  std::vector<std::int8_t> explicit_ring;  // when boundary == Explicit
  Convention convention = Convention::Ferro;

  std::uint64_t site_count() const {
    std::uint64_t v = 1;
    for (int e : extent) v *= static_cast<std::uint64_t>(e);
    return v;
  }
};

// Single-site conditional of the volume weight: probability that the spin
// at a site is + given neighbor sum h (in-volume neighbors plus boundary
// field). Ferro: exp(b h) / (exp(b h) + exp(-b h)); monotone in h.
double heat_bath_flip_probability(double beta, int neighbor_sum,
                                  Convention convention = Convention::Ferro);

// Full table over all 2^N configurations, N <= 25. Configurations are
// indexed by bitmask in row-major site order, bit set = plus.
struct ExactDistribution {
  std::vector<int> extent;
  std::vector<double> prob;    // size 2^N, sums to 1
  double log_partition = 0.0;  // log Z

  std::size_t size() const { return prob.size(); }
  // P(spin at flat site index is +)
  double plus_marginal(int flat_index) const;
  SpinConfig config_from_index(std::uint64_t index, BoundaryKind b,
                               std::vector<std::int8_t> ring = {}) const;
};

inline constexpr std::uint64_t kEnumerationCap = 25;

ExactDistribution exact_distribution(const GibbsSpec& spec);

// log Z by streaming enumeration (no 2^N table); beta may carry any sign
// here, only the samplers require beta > 0
double log_partition(const GibbsSpec& spec);

// log sum_A P(sigma_V = A)^2 over all patterns on the full volume
double log_collision_sum(const GibbsSpec& spec);

// Exact conditional distribution given fixed spins on a sub-window
// (entries +-1 fix a site, 0 leaves it free).
ExactDistribution exact_conditional_distribution(
    const GibbsSpec& spec, const std::vector<std::int8_t>& frozen);

// Exact sampling by CDF inversion from an enumerated table.
class ExactSampler {
 public:
  ExactSampler(const GibbsSpec& spec);
  SpinConfig sample(Xoshiro256& rng) const;
  std::uint64_t sample_index(Xoshiro256& rng) const;
  const ExactDistribution& distribution() const { return dist_; }

 private:
  GibbsSpec spec_;
  ExactDistribution dist_;
  std::vector<double> cdf_;
};

// Mutable working field for Markov chains: int8 spins on a ghost-padded
// grid so the update kernel needs no edge branches. Not shared across
// threads; replicas own their fields.
class SpinField {
 public:
  SpinField(const GibbsSpec& spec, int start_spin = +1);

  int width() const { return w_; }
  int height() const { return h_; }
  int spin(int x, int y) const { return a_[idx(x, y)]; }
  void set_spin(int x, int y, int s) { a_[idx(x, y)] = static_cast<std::int8_t>(s); }

  void freeze(int x, int y, int s);
  bool frozen(int x, int y) const { return frozen_[idx(x, y)] != 0; }

  // one raster sweep of heat-bath updates
  void sweep(Xoshiro256& rng);
  // sweep with externally supplied uniforms (shared randomness for
  // monotone coupling); counter advances per site in raster order
  void sweep_keyed(std::uint64_t key, std::uint64_t sweep_index);

  double mean_spin() const;
  SpinConfig freeze_config() const;

  // sitewise partial order (every spin of *this >= other); used by the
  // sandwich assertion
  bool dominates(const SpinField& other) const;

 private:
  std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>(y + 1) * stride_ + (x + 1);
  }
  void update_site(std::size_t i, double u);

  GibbsSpec spec_;
  int w_, h_, stride_;
  std::vector<std::int8_t> a_;       // padded field, ghost ring = boundary
  std::vector<std::int8_t> frozen_;  // nonzero = held fixed
  double table_[9];                  // P(+ | neighbor sum h), h in [-4,4]
};

struct HeatBathOptions {
  int burn_in = 200;  // full sweeps from the all-plus start
  int spacing = 8;    // sweeps between successive emitted samples
};

// Forward heat-bath sampler; approximate for finite burn-in.
class HeatBathSampler {
 public:
  HeatBathSampler(GibbsSpec spec, HeatBathOptions opt, std::uint64_t seed);

  // draws `count` configs from one chain (burn-in once, then spaced)
  std::vector<SpinConfig> sample(int count);
  // single config per fresh chain; cheapest form used by experiment code
  SpinConfig sample_one();
  SpinField& field() { return field_; }
  void run_sweeps(int n);

  // freeze a sub-window to the given pattern before sampling
  void freeze_pattern(const Pattern& pattern);

 private:
  GibbsSpec spec_;
  HeatBathOptions opt_;
  SpinField field_;
  Xoshiro256 rng_;
  bool burned_in_ = false;
};

struct CftpOptions {
  int max_epoch = 1 << 20;      // cap on the backward window, in sweeps
  bool check_sandwich = false;  // assert hi >= lo after every sweep
};

struct CftpResult {
  SpinConfig config;
  int epoch = 0;  // backward window at coalescence, in sweeps
};

// Monotone coupling-from-the-past for the Ferro convention. The hi/lo
// chains start from all-plus/all-minus at time -T and share per-(sweep,
// site) uniforms derived from a counter hash, so doubling T replays the
// same randomness. Coalescence certifies an exact draw.
class CftpSampler {
 public:
  CftpSampler(GibbsSpec spec, CftpOptions opt, std::uint64_t seed);

  CftpResult sample();                       // throws CftpCapError at the cap
  std::vector<SpinConfig> sample(int count); // independent draws (seed stream)

  // optional frozen sub-window (conditional perfect sampling)
  void freeze_pattern(const Pattern& pattern);

 private:
  GibbsSpec spec_;
  CftpOptions opt_;
  std::uint64_t seed_;
  std::uint64_t draw_index_ = 0;
  std::vector<std::pair<Site, std::int8_t>> frozen_;
};

struct CftpCapError : std::runtime_error {
  explicit CftpCapError(int epoch)
      : std::runtime_error("coalescence not reached within epoch cap"),
        reached_epoch(epoch) {}
  int reached_epoch;
};

// Samples with the spins of `frozen` clamped; exact conditional law on
// enumerable volumes via CFTP (monotone even with clamped sites), heat
// bath otherwise.
std::vector<SpinConfig> conditional_sample(const GibbsSpec& spec,
                                           const Pattern& frozen, int count,
                                           std::uint64_t seed,
                                           const HeatBathOptions& opt = {});

}  // namespace gibbslab
