#include "gibbslab/gibbs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "gibbslab/patterns.hpp"

namespace gibbslab {

double heat_bath_flip_probability(double beta, int h, Convention convention) {
  double s = convention == Convention::Ferro ? 1.0 : -1.0;
  double e = std::exp(2.0 * s * beta * h);
  return e / (1.0 + e);
}

namespace {

struct EnumContext {
  int w = 0, h = 0, nsites = 0;
  std::uint64_t row_mask = 0;
  std::vector<std::pair<int, std::uint64_t>> field_masks;  // (field, sites)
  int total_h_bonds = 0, total_v_bonds = 0;
  double field_offset = 0.0;  // sum of boundary fields
  double sign = 1.0;          // +1 Ferro, -1 Literal
};

EnumContext make_context(const GibbsSpec& spec) {
  if (spec.extent.size() != 2)
    throw std::invalid_argument("exact enumeration supports d=2 volumes");
  EnumContext ctx;
  ctx.w = spec.extent[0];
  ctx.h = spec.extent[1];
  ctx.nsites = ctx.w * ctx.h;
  if (static_cast<std::uint64_t>(ctx.nsites) > kEnumerationCap)
    throw std::invalid_argument(
        "volume exceeds the enumeration cap of 25 sites");
  ctx.row_mask = (ctx.w == 64) ? ~0ull : ((1ull << ctx.w) - 1);
  ctx.total_h_bonds = (ctx.w - 1) * ctx.h;
  ctx.total_v_bonds = ctx.w * (ctx.h - 1);
  ctx.sign = spec.convention == Convention::Ferro ? 1.0 : -1.0;

  // per-site boundary field sum_{y outside, y~x} eta_y
  std::vector<int> field(ctx.nsites, 0);
  auto outside_spin = [&](const Site& s) -> int {
    switch (spec.boundary) {
      case BoundaryKind::Plus: return +1;
      case BoundaryKind::Minus: return -1;
      case BoundaryKind::Free: return 0;
      case BoundaryKind::Explicit:
        return spec.explicit_ring[ring_index(spec.extent, s)];
    }
    return 0;
  };
  for (int y = 0; y < ctx.h; ++y)
    for (int x = 0; x < ctx.w; ++x) {
      int f = 0;
      if (x == 0) f += outside_spin({-1, y, 0});
      if (x == ctx.w - 1) f += outside_spin({ctx.w, y, 0});
      if (y == 0) f += outside_spin({x, -1, 0});
      if (y == ctx.h - 1) f += outside_spin({x, ctx.h, 0});
      field[y * ctx.w + x] = f;
    }
  for (int v = -4; v <= 4; ++v) {
    if (v == 0) continue;
    std::uint64_t mask = 0;
    for (int i = 0; i < ctx.nsites; ++i)
      if (field[i] == v) mask |= 1ull << i;
    if (mask) ctx.field_masks.emplace_back(v, mask);
  }
  for (int i = 0; i < ctx.nsites; ++i) ctx.field_offset += field[i];
  return ctx;
}

// sum_<xy> s_x s_y + sum_boundary s_x eta_y for the configuration bits
inline double interaction(const EnumContext& ctx, std::uint64_t cfg) {
  int disagree_h = 0, disagree_v = 0;
  std::uint64_t prev_row = 0;
  for (int y = 0; y < ctx.h; ++y) {
    std::uint64_t r = (cfg >> (y * ctx.w)) & ctx.row_mask;
    disagree_h += std::popcount((r ^ (r >> 1)) & (ctx.row_mask >> 1));
    if (y > 0) disagree_v += std::popcount(r ^ prev_row);
    prev_row = r;
  }
  double bonds = (ctx.total_h_bonds - 2 * disagree_h) +
                 (ctx.total_v_bonds - 2 * disagree_v);
  double bfield = -ctx.field_offset;
  for (auto [v, mask] : ctx.field_masks)
    bfield += 2.0 * v * std::popcount(cfg & mask);
  return bonds + bfield;
}

}  // namespace

double ExactDistribution::plus_marginal(int flat_index) const {
  double p = 0.0;
  for (std::size_t cfg = 0; cfg < prob.size(); ++cfg)
    if ((cfg >> flat_index) & 1u) p += prob[cfg];
  return p;
}

SpinConfig ExactDistribution::config_from_index(std::uint64_t index,
                                                BoundaryKind b,
                                                std::vector<std::int8_t> ring) const {
  std::vector<std::int8_t> field(static_cast<std::size_t>(extent[0]) * extent[1]);
  for (std::size_t i = 0; i < field.size(); ++i)
    field[i] = (index >> i) & 1u ? +1 : -1;
  return SpinConfig::from_field(extent, field, b, std::move(ring));
}

double log_partition(const GibbsSpec& spec) {
  EnumContext ctx = make_context(spec);
  const std::uint64_t count = 1ull << ctx.nsites;
  // all-plus has maximal weight only for plus-ish boundaries; scan for the
  // true max first so the shifted sum cannot overflow
  double emax = -1e300;
  for (std::uint64_t cfg = 0; cfg < count; ++cfg)
    emax = std::max(emax, ctx.sign * spec.beta * interaction(ctx, cfg));
  long double z = 0.0;
  for (std::uint64_t cfg = 0; cfg < count; ++cfg)
    z += std::exp(ctx.sign * spec.beta * interaction(ctx, cfg) - emax);
  return emax + std::log(static_cast<double>(z));
}

double log_collision_sum(const GibbsSpec& spec) {
  EnumContext ctx = make_context(spec);
  const std::uint64_t count = 1ull << ctx.nsites;
  double emax = -1e300;
  for (std::uint64_t cfg = 0; cfg < count; ++cfg)
    emax = std::max(emax, ctx.sign * spec.beta * interaction(ctx, cfg));
  long double z = 0.0, z2 = 0.0;
  for (std::uint64_t cfg = 0; cfg < count; ++cfg) {
    long double w = std::exp(ctx.sign * spec.beta * interaction(ctx, cfg) - emax);
    z += w;
    z2 += w * w;
  }
  return std::log(static_cast<double>(z2)) - 2.0 * std::log(static_cast<double>(z));
}

ExactDistribution exact_distribution(const GibbsSpec& spec) {
  EnumContext ctx = make_context(spec);
  ExactDistribution out;
  out.extent = spec.extent;
  const std::uint64_t count = 1ull << ctx.nsites;
  out.prob.resize(count);
  double emax = -1e300;
  for (std::uint64_t cfg = 0; cfg < count; ++cfg) {
    double e = ctx.sign * spec.beta * interaction(ctx, cfg);
    out.prob[cfg] = e;
    emax = std::max(emax, e);
  }
  long double z = 0.0;
  for (auto& p : out.prob) {
    p = std::exp(p - emax);
    z += p;
  }
  for (auto& p : out.prob) p = static_cast<double>(p / z);
  out.log_partition = emax + std::log(static_cast<double>(z));
  return out;
}

ExactDistribution exact_conditional_distribution(
    const GibbsSpec& spec, const std::vector<std::int8_t>& frozen) {
  if (frozen.size() != spec.site_count())
    throw std::invalid_argument("frozen mask size mismatch");
  ExactDistribution dist = exact_distribution(spec);
  std::uint64_t fixed_bits = 0, fixed_mask = 0;
  for (std::size_t i = 0; i < frozen.size(); ++i) {
    if (frozen[i] == 0) continue;
    fixed_mask |= 1ull << i;
    if (frozen[i] > 0) fixed_bits |= 1ull << i;
  }
  double total = 0.0;
  for (std::size_t cfg = 0; cfg < dist.prob.size(); ++cfg) {
    if ((cfg & fixed_mask) != fixed_bits) dist.prob[cfg] = 0.0;
    total += dist.prob[cfg];
  }
  if (total <= 0.0) throw std::runtime_error("conditioning event has mass 0");
  for (auto& p : dist.prob) p /= total;
  return dist;
}

ExactSampler::ExactSampler(const GibbsSpec& spec)
    : spec_(spec), dist_(exact_distribution(spec)) {
  cdf_.resize(dist_.prob.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cdf_.size(); ++i) {
    acc += dist_.prob[i];
    cdf_[i] = acc;
  }
  cdf_.back() = 1.0;
}

std::uint64_t ExactSampler::sample_index(Xoshiro256& rng) const {
  double u = rng.uniform();
  return std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin();
}

SpinConfig ExactSampler::sample(Xoshiro256& rng) const {
  return dist_.config_from_index(sample_index(rng), spec_.boundary,
                                 spec_.explicit_ring);
}

SpinField::SpinField(const GibbsSpec& spec, int start_spin) : spec_(spec) {
  if (spec.extent.size() != 2)
    throw std::invalid_argument("SpinField supports d=2 volumes");
  w_ = spec.extent[0];
  h_ = spec.extent[1];
  stride_ = w_ + 2;
  a_.assign(static_cast<std::size_t>(stride_) * (h_ + 2), 0);
  frozen_.assign(a_.size(), 0);
  for (int y = 0; y < h_; ++y)
    for (int x = 0; x < w_; ++x)
      a_[idx(x, y)] = static_cast<std::int8_t>(start_spin);
  // ghost ring carries the boundary condition; Free leaves zeros
  auto ghost = [&](int x, int y, int s) {
    a_[static_cast<std::size_t>(y + 1) * stride_ + (x + 1)] =
        static_cast<std::int8_t>(s);
  };
  if (spec.boundary == BoundaryKind::Plus || spec.boundary == BoundaryKind::Minus) {
    int s = spec.boundary == BoundaryKind::Plus ? +1 : -1;
    for (int x = -1; x <= w_; ++x) { ghost(x, -1, s); ghost(x, h_, s); }
    for (int y = 0; y < h_; ++y) { ghost(-1, y, s); ghost(w_, y, s); }
  } else if (spec.boundary == BoundaryKind::Explicit) {
    for (int x = 0; x < w_; ++x) {
      ghost(x, -1, spec.explicit_ring[ring_index(spec.extent, {x, -1, 0})]);
      ghost(x, h_, spec.explicit_ring[ring_index(spec.extent, {x, h_, 0})]);
    }
    for (int y = 0; y < h_; ++y) {
      ghost(-1, y, spec.explicit_ring[ring_index(spec.extent, {-1, y, 0})]);
      ghost(w_, y, spec.explicit_ring[ring_index(spec.extent, {w_, y, 0})]);
    }
  }
  for (int h = -4; h <= 4; ++h)
    table_[h + 4] = heat_bath_flip_probability(spec.beta, h, spec.convention);
}

void SpinField::freeze(int x, int y, int s) {
  a_[idx(x, y)] = static_cast<std::int8_t>(s);
  frozen_[idx(x, y)] = 1;
}

inline void SpinField::update_site(std::size_t i, double u) {
  int h = a_[i - 1] + a_[i + 1] + a_[i - stride_] + a_[i + stride_];
  a_[i] = u < table_[h + 4] ? +1 : -1;
}

void SpinField::sweep(Xoshiro256& rng) {
  for (int y = 0; y < h_; ++y) {
    std::size_t i = idx(0, y);
    for (int x = 0; x < w_; ++x, ++i) {
      double u = rng.uniform();  // one draw per site keeps replay simple
      if (!frozen_[i]) update_site(i, u);
    }
  }
}

void SpinField::sweep_keyed(std::uint64_t key, std::uint64_t sweep_index) {
  std::uint64_t base = sweep_index * static_cast<std::uint64_t>(w_) * h_;
  std::uint64_t c = base;
  for (int y = 0; y < h_; ++y) {
    std::size_t i = idx(0, y);
    for (int x = 0; x < w_; ++x, ++i, ++c) {
      if (frozen_[i]) continue;
      update_site(i, counter_uniform(key, c));
    }
  }
}

double SpinField::mean_spin() const {
  long long total = 0;
  for (int y = 0; y < h_; ++y)
    for (int x = 0; x < w_; ++x) total += a_[idx(x, y)];
  return static_cast<double>(total) / (static_cast<double>(w_) * h_);
}

SpinConfig SpinField::freeze_config() const {
  std::vector<std::int8_t> field;
  field.reserve(static_cast<std::size_t>(w_) * h_);
  for (int y = 0; y < h_; ++y)
    for (int x = 0; x < w_; ++x) field.push_back(a_[idx(x, y)]);
  return SpinConfig::from_field(spec_.extent, field, spec_.boundary,
                                spec_.explicit_ring);
}

bool SpinField::dominates(const SpinField& other) const {
  for (int y = 0; y < h_; ++y)
    for (int x = 0; x < w_; ++x)
      if (a_[idx(x, y)] < other.a_[idx(x, y)]) return false;
  return true;
}

HeatBathSampler::HeatBathSampler(GibbsSpec spec, HeatBathOptions opt,
                                 std::uint64_t seed)
    : spec_(std::move(spec)), opt_(opt), field_(spec_, +1), rng_(seed) {}

void HeatBathSampler::run_sweeps(int n) {
  for (int i = 0; i < n; ++i) field_.sweep(rng_);
}

void HeatBathSampler::freeze_pattern(const Pattern& pattern) {
  for (std::size_t i = 0; i < pattern.support().size(); ++i) {
    const Site& s = pattern.support()[i];
    if (s[0] < 0 || s[0] >= field_.width() || s[1] < 0 || s[1] >= field_.height())
      throw std::invalid_argument("frozen support outside the volume");
    field_.freeze(s[0], s[1], pattern.values()[i]);
  }
}

SpinConfig HeatBathSampler::sample_one() {
  if (!burned_in_) {
    run_sweeps(opt_.burn_in);
    burned_in_ = true;
  }
  return field_.freeze_config();
}

std::vector<SpinConfig> HeatBathSampler::sample(int count) {
  std::vector<SpinConfig> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    if (!burned_in_) {
      run_sweeps(opt_.burn_in);
      burned_in_ = true;
    } else {
      run_sweeps(opt_.spacing);
    }
    out.push_back(field_.freeze_config());
  }
  return out;
}

CftpSampler::CftpSampler(GibbsSpec spec, CftpOptions opt, std::uint64_t seed)
    : spec_(std::move(spec)), opt_(opt), seed_(seed) {
  if (spec_.convention != Convention::Ferro)
    throw std::invalid_argument(
        "coupling from the past needs the monotone (Ferro) convention");
}

void CftpSampler::freeze_pattern(const Pattern& pattern) {
  for (std::size_t i = 0; i < pattern.support().size(); ++i)
    frozen_.emplace_back(pattern.support()[i], pattern.values()[i]);
}

CftpResult CftpSampler::sample() {
  std::uint64_t key = derive_seed(seed_, 0x43465450ull, draw_index_++);
  for (int epoch = 1;; epoch *= 2) {
    if (epoch > opt_.max_epoch) throw CftpCapError(epoch / 2);
    SpinField hi(spec_, +1), lo(spec_, -1);
    for (auto& [s, v] : frozen_) {
      hi.freeze(s[0], s[1], v);
      lo.freeze(s[0], s[1], v);
    }
    // sweep times run from -epoch to -1; sweep_index t is the same draw at
    // every epoch, so longer windows replay the shorter ones
    for (int t = epoch; t >= 1; --t) {
      hi.sweep_keyed(key, static_cast<std::uint64_t>(t));
      lo.sweep_keyed(key, static_cast<std::uint64_t>(t));
      if (opt_.check_sandwich && !hi.dominates(lo))
        throw std::logic_error("monotone sandwich violated");
    }
    bool coalesced = true;
    for (int y = 0; y < hi.height() && coalesced; ++y)
      for (int x = 0; x < hi.width(); ++x)
        if (hi.spin(x, y) != lo.spin(x, y)) {
          coalesced = false;
          break;
        }
    if (coalesced) return CftpResult{hi.freeze_config(), epoch};
  }
}

std::vector<SpinConfig> CftpSampler::sample(int count) {
  std::vector<SpinConfig> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(sample().config);
  return out;
}

std::vector<SpinConfig> conditional_sample(const GibbsSpec& spec,
                                           const Pattern& frozen, int count,
                                           std::uint64_t seed,
                                           const HeatBathOptions& opt) {
  std::vector<SpinConfig> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    HeatBathSampler sampler(spec, opt, derive_seed(seed, 0x434f4e44ull, i));
    sampler.freeze_pattern(frozen);
    out.push_back(sampler.sample_one());
  }
  return out;
}

}  // namespace gibbslab
