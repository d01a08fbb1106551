#include "gibbslab/patterns.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <unordered_map>

namespace gibbslab {

Pattern::Pattern(std::vector<Site> support, std::vector<std::int8_t> values,
                 SupportKind kind)
    : support_(std::move(support)), values_(std::move(values)), kind_(kind) {
  if (support_.empty()) throw std::invalid_argument("pattern support is empty");
  if (support_.size() != values_.size())
    throw std::invalid_argument("pattern support/value size mismatch");
  dim_ = 2;
  for (const Site& s : support_)
    if (s[2] != 0) dim_ = 3;
  Site lo = support_[0], hi = support_[0];
  for (const Site& s : support_)
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], s[i]);
      hi[i] = std::max(hi[i], s[i]);
    }
  origin_ = lo;
  bbox_ = {hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1};
}

Pattern Pattern::from_window(const SpinConfig& sigma, const CubeShape& cube) {
  std::vector<Site> support = cube.sites();
  std::vector<std::int8_t> values;
  values.reserve(support.size());
  for (const Site& s : support)
    values.push_back(static_cast<std::int8_t>(sigma.spin(s)));
  return Pattern(std::move(support), std::move(values), SupportKind::Cube);
}

Pattern Pattern::cube_constant(int n, int spin, int dim) {
  CubeShape c{n, {0, 0, 0}, dim};
  std::vector<Site> support = c.sites();
  std::vector<std::int8_t> values(support.size(), static_cast<std::int8_t>(spin));
  return Pattern(std::move(support), std::move(values), SupportKind::Cube);
}

Pattern Pattern::from_rows(const std::vector<std::string>& rows) {
  std::vector<Site> support;
  std::vector<std::int8_t> values;
  for (int y = 0; y < static_cast<int>(rows.size()); ++y)
    for (int x = 0; x < static_cast<int>(rows[y].size()); ++x) {
      char c = rows[y][x];
      if (c == '.') continue;
      if (c != '+' && c != '-') throw std::invalid_argument("bad pattern char");
      support.push_back({x, y, 0});
      values.push_back(c == '+' ? +1 : -1);
    }
  bool full = true;
  for (const auto& r : rows)
    if (r.find('.') != std::string::npos) full = false;
  bool square = !rows.empty() && rows.size() == rows[0].size();
  return Pattern(std::move(support), std::move(values),
                 full && square ? SupportKind::Cube : SupportKind::Mask);
}

Pattern Pattern::from_nested(const SpinConfig& eta, const NestedShapes& shapes,
                             int k, Site offset) {
  std::vector<Site> support;
  std::vector<std::int8_t> values;
  for (const Site& s : shapes.prefix(k)) {
    Site p = s + offset;
    support.push_back(p);
    values.push_back(static_cast<std::int8_t>(eta.spin(p)));
  }
  return Pattern(std::move(support), std::move(values), SupportKind::Nested);
}

std::optional<int> Pattern::cube_side_index() const {
  if (bbox_[0] != bbox_[1] || bbox_[2] != 1) return std::nullopt;
  std::uint64_t expect = static_cast<std::uint64_t>(bbox_[0]) * bbox_[1];
  if (support_.size() != expect) return std::nullopt;
  // bbox-filling square support; verify no duplicates via the value grid
  std::vector<std::uint8_t> seen(expect, 0);
  for (const Site& s : support_) {
    std::size_t i = static_cast<std::size_t>(s[1] - origin_[1]) * bbox_[0] +
                    (s[0] - origin_[0]);
    if (seen[i]) return std::nullopt;
    seen[i] = 1;
  }
  return bbox_[0] - 1;
}

int Pattern::value_at(const Site& s) const {
  for (std::size_t i = 0; i < support_.size(); ++i)
    if (support_[i] == s) return values_[i];
  throw std::invalid_argument("site not in pattern support");
}

Pattern Pattern::shifted(const Site& x) const {
  std::vector<Site> support(support_);
  for (Site& s : support) s = s + x;
  return Pattern(std::move(support), values_, kind_);
}

bool Pattern::operator==(const Pattern& other) const {
  if (support_.size() != other.support_.size()) return false;
  std::unordered_map<Site, int, SiteHash> m;
  for (std::size_t i = 0; i < support_.size(); ++i) m[support_[i]] = values_[i];
  for (std::size_t i = 0; i < other.support_.size(); ++i) {
    auto it = m.find(other.support_[i]);
    if (it == m.end() || it->second != other.values_[i]) return false;
  }
  return true;
}

Pattern shift_pattern(const Pattern& a, const Site& x) { return a.shifted(x); }

std::uint64_t OccurrenceBitmap::count() const {
  std::uint64_t c = 0;
  for (std::uint64_t w : bits_) c += std::popcount(w);
  return c;
}

std::uint64_t OccurrenceBitmap::count_upto(int xmax, int ymax) const {
  if (xmax < 0 || ymax < 0) return 0;
  xmax = std::min(xmax, xs_ - 1);
  ymax = std::min(ymax, ys_ - 1);
  std::uint64_t c = 0;
  int full_words = (xmax + 1) >> 6;
  std::uint64_t tail_mask = ((xmax + 1) & 63) ? ((1ull << ((xmax + 1) & 63)) - 1) : 0;
  for (int y = 0; y <= ymax; ++y) {
    const std::uint64_t* r = row(y);
    for (int w = 0; w < full_words; ++w) c += std::popcount(r[w]);
    if (tail_mask) c += std::popcount(r[full_words] & tail_mask);
  }
  return c;
}

std::vector<int> OccurrenceBitmap::anchor_levels() const {
  std::vector<int> levels;
  for (int y = 0; y < ys_; ++y) {
    const std::uint64_t* r = row(y);
    for (int w = 0; w < wpr_; ++w) {
      std::uint64_t bits = r[w];
      while (bits) {
        int x = (w << 6) + std::countr_zero(bits);
        bits &= bits - 1;
        levels.push_back(std::max(x, y));
      }
    }
  }
  std::sort(levels.begin(), levels.end());
  return levels;
}

PatternScanner::PatternScanner(const Pattern& pattern) : pattern_(pattern) {
  bw_ = pattern.bbox()[0];
  bh_ = pattern.bbox()[1];
  if (pattern.bbox()[2] != 1)
    throw std::invalid_argument("scanner supports d=2 patterns");
  const Site o = pattern.origin();
  for (std::size_t i = 0; i < pattern.support().size(); ++i) {
    const Site& s = pattern.support()[i];
    ops_.push_back(RowOp{s[1] - o[1], s[0] - o[0], pattern.values()[i] > 0});
  }
  // group by row so the scan walks each window row once
  std::sort(ops_.begin(), ops_.end(), [](const RowOp& a, const RowOp& b) {
    return a.dy != b.dy ? a.dy < b.dy : a.dx < b.dx;
  });
}

OccurrenceBitmap PatternScanner::scan(const SpinConfig& window) const {
  const int W = window.width(), H = window.height();
  const int xs = W - bw_ + 1, ys = H - bh_ + 1;
  OccurrenceBitmap out(std::max(xs, 0), std::max(ys, 0));
  if (xs <= 0 || ys <= 0) return out;

  // padded copy: two zero guard words per row so shifted reads stay in range
  const int wpr = window.words_per_row();
  const int pad_wpr = wpr + 2;
  std::vector<std::uint64_t> padded(static_cast<std::size_t>(pad_wpr) * H, 0);
  for (int y = 0; y < H; ++y)
    std::memcpy(padded.data() + static_cast<std::size_t>(y) * pad_wpr,
                window.row_ptr(y), static_cast<std::size_t>(wpr) * 8);

  const int out_words = out.words_per_row();
  std::uint64_t x_tail = (xs & 63) ? ((1ull << (xs & 63)) - 1) : ~0ull;
  std::vector<std::uint64_t> acc(out_words);
  for (int y = 0; y < ys; ++y) {
    std::fill(acc.begin(), acc.end(), ~0ull);
    for (const RowOp& op : ops_) {
      const std::uint64_t* r =
          padded.data() + static_cast<std::size_t>(y + op.dy) * pad_wpr;
      const int wo = op.dx >> 6, bo = op.dx & 63;
      for (int w = 0; w < out_words; ++w) {
        std::uint64_t v = r[w + wo] >> bo;
        if (bo) v |= r[w + wo + 1] << (64 - bo);
        acc[w] &= op.plus ? v : ~v;
      }
    }
    acc[out_words - 1] &= x_tail;
    std::memcpy(out.row(y), acc.data(), static_cast<std::size_t>(out_words) * 8);
  }
  return out;
}

bool PatternScanner::matches_at(const SpinConfig& window, int x, int y) const {
  for (const RowOp& op : ops_) {
    int sx = x + op.dx, sy = y + op.dy;
    if (sx < 0 || sx >= window.width() || sy < 0 || sy >= window.height())
      return false;
    if ((window.spin(sx, sy) > 0) != op.plus) return false;
  }
  return true;
}

std::uint64_t PatternScanner::count_occurrences(const SpinConfig& window,
                                                const CubeShape& w) const {
  for (int i = 0; i < w.dim; ++i) {
    if (w.offset[i] < 0) throw std::invalid_argument("W exceeds the window");
    int hi = w.offset[i] + w.n;
    if (hi >= window.extent()[i])
      throw std::invalid_argument("W exceeds the window");
  }
  OccurrenceBitmap bm = scan(window);
  // translate anchors p with bbox inside W
  std::uint64_t total = 0;
  int x0 = w.offset[0], y0 = w.offset[1];
  int x1 = w.offset[0] + w.n - bw_ + 1, y1 = w.offset[1] + w.n - bh_ + 1;
  if (x1 < x0 || y1 < y0) return 0;
  for (int y = y0; y < std::min(y1 + 1, bm.y_range()); ++y)
    for (int x = x0; x < std::min(x1 + 1, bm.x_range()); ++x)
      if (bm.test(x, y)) ++total;
  return total;
}

std::uint64_t count_occurrences(const Pattern& a, const CubeShape& w,
                                const SpinConfig& sigma) {
  return PatternScanner(a).count_occurrences(sigma, w);
}

const char* to_string(TimeKind k) {
  switch (k) {
    case TimeKind::Occurrence: return "occurrence";
    case TimeKind::Return: return "return";
    case TimeKind::Waiting: return "waiting";
    case TimeKind::Matching: return "matching";
    case TimeKind::Overlap: return "overlap";
    case TimeKind::PthOccurrence: return "pth_occurrence";
  }
  return "?";
}

namespace {

// sorted cube levels k (so that the anchored C_k first contains the
// occurrence) of all anchors in the positive quadrant of `seq`, up to cap
std::vector<int> occurrence_levels(const OccurrenceBitmap& bm,
                                   const CubeSequence& seq, int bw, int bh,
                                   int cap) {
  const int ax = seq.anchor[0], ay = seq.anchor[1];
  std::vector<int> levels;
  for (int y = std::max(ay, 0); y < bm.y_range(); ++y) {
    int base_y = y - ay + bh - 1;
    if (base_y > cap) break;
    const std::uint64_t* r = bm.row(y);
    for (int w = 0; w < bm.words_per_row(); ++w) {
      std::uint64_t bits = r[w];
      while (bits) {
        int x = (w << 6) + std::countr_zero(bits);
        bits &= bits - 1;
        if (x < ax) continue;
        int level = std::max(x - ax + bw - 1, base_y);
        if (level <= cap) levels.push_back(level);
      }
    }
  }
  std::sort(levels.begin(), levels.end());
  return levels;
}

void check_cap_inside(const SpinConfig& sigma, const CubeSequence& seq,
                      int cap) {
  for (int i = 0; i < seq.dim; ++i)
    if (seq.anchor[i] < 0 || seq.anchor[i] + cap >= sigma.extent()[i])
      throw std::invalid_argument("V_cap exceeds the sample window");
}

TimeRecord levels_to_record(const std::vector<int>& levels, std::size_t index,
                            TimeKind kind, const CubeSequence& seq, int cap) {
  TimeRecord rec;
  rec.kind = kind;
  rec.window_cap = seq.volume(cap);
  if (levels.size() > index) {
    rec.value = seq.volume(levels[index]);
    rec.censored = false;
  } else {
    rec.value = rec.window_cap;
    rec.censored = true;
  }
  return rec;
}

}  // namespace

TimeRecord occurrence_time(const Pattern& a, const SpinConfig& sigma,
                           const CubeSequence& seq, int cap) {
  check_cap_inside(sigma, seq, cap);
  PatternScanner sc(a);
  OccurrenceBitmap bm = sc.scan(sigma);
  auto levels = occurrence_levels(bm, seq, a.bbox()[0], a.bbox()[1], cap);
  return levels_to_record(levels, 0, TimeKind::Occurrence, seq, cap);
}

TimeRecord return_time(const Pattern& a, const SpinConfig& sigma,
                       const CubeSequence& seq, int cap) {
  check_cap_inside(sigma, seq, cap);
  PatternScanner sc(a);
  Site o = a.origin();
  if (!sc.matches_at(sigma, o[0], o[1]))
    throw std::invalid_argument("sample does not realize the pattern");
  OccurrenceBitmap bm = sc.scan(sigma);
  auto levels = occurrence_levels(bm, seq, a.bbox()[0], a.bbox()[1], cap);
  TimeRecord rec = levels_to_record(levels, 1, TimeKind::Return, seq, cap);
  return rec;
}

TimeRecord waiting_time(const SpinConfig& eta, const SpinConfig& sigma, int n,
                        const CubeSequence& seq, int cap) {
  CubeShape cn{n, seq.anchor, seq.dim};
  Pattern a = Pattern::from_window(eta, cn);
  TimeRecord rec = occurrence_time(a, sigma, seq, cap);
  rec.kind = TimeKind::Waiting;
  return rec;
}

SpinConfig agreement_mask(const SpinConfig& sigma, const SpinConfig& eta) {
  if (sigma.extent() != eta.extent())
    throw std::invalid_argument("agreement mask needs identical extents");
  SpinConfig mask(sigma.extent(), BoundaryKind::Free);
  const int wpr = mask.words_per_row();
  std::uint64_t tail = (sigma.width() & 63)
                           ? ((1ull << (sigma.width() & 63)) - 1)
                           : ~0ull;
  for (int z = 0; z < sigma.depth(); ++z)
    for (int y = 0; y < sigma.height(); ++y) {
      const std::uint64_t* a = sigma.row_ptr(y, z);
      const std::uint64_t* b = eta.row_ptr(y, z);
      std::uint64_t* m = const_cast<std::uint64_t*>(mask.row_ptr(y, z));
      for (int w = 0; w < wpr; ++w) m[w] = ~(a[w] ^ b[w]);
      m[wpr - 1] &= tail;
    }
  return mask;
}

TimeRecord matching_time(const SpinConfig& sigma, const SpinConfig& eta, int n,
                         const CubeSequence& seq, int cap) {
  SpinConfig mask = agreement_mask(sigma, eta);
  Pattern all_agree = Pattern::cube_constant(n, +1, seq.dim);
  TimeRecord rec = occurrence_time(all_agree, mask, seq, cap);
  rec.kind = TimeKind::Matching;
  return rec;
}

std::vector<TimeRecord> pth_occurrence_times(const Pattern& a,
                                             const SpinConfig& sigma, int p_max,
                                             const CubeSequence& seq, int cap) {
  check_cap_inside(sigma, seq, cap);
  PatternScanner sc(a);
  OccurrenceBitmap bm = sc.scan(sigma);
  auto levels = occurrence_levels(bm, seq, a.bbox()[0], a.bbox()[1], cap);
  std::vector<TimeRecord> out;
  out.reserve(p_max);
  for (int p = 1; p <= p_max; ++p) {
    TimeRecord rec = levels_to_record(levels, p - 1, TimeKind::PthOccurrence,
                                      seq, cap);
    rec.level = p;
    out.push_back(rec);
  }
  return out;
}

std::vector<std::uint64_t> overlap_survivors(const SpinConfig& mask,
                                             const NestedShapes& shapes,
                                             int n) {
  auto [W, H] = shapes.bbox(n);
  if (W > mask.width() || H > mask.height())
    throw std::invalid_argument("nested shape exceeds the mask window");
  // composite rows: bit set iff the site is in G_n and the mask agrees;
  // rows padded with guard words so shifted reads stay in range
  const int wpr = (W + 63) / 64;
  const int cpr = 2 * wpr + 2;
  std::vector<std::uint64_t> comp(static_cast<std::size_t>(H) * cpr, 0);
  for (const Site& s : shapes.prefix(n)) {
    if (mask.spin(s[0], s[1]) > 0)
      comp[static_cast<std::size_t>(s[1]) * cpr + (s[0] >> 6)] |=
          1ull << (s[0] & 63);
  }
  std::vector<std::uint64_t> alive(static_cast<std::size_t>(H) * wpr, ~0ull);
  std::uint64_t tail = (W & 63) ? ((1ull << (W & 63)) - 1) : ~0ull;
  for (int y = 0; y < H; ++y) alive[static_cast<std::size_t>(y) * wpr + wpr - 1] &= tail;

  std::vector<std::uint64_t> survivors;
  survivors.push_back(static_cast<std::uint64_t>(W) * H);
  std::span<const Site> sites = shapes.prefix(n);
  for (int j = 0; j < n; ++j) {
    const int sx = sites[j][0], sy = sites[j][1];
    const int wo = sx >> 6, bo = sx & 63;
    std::uint64_t alive_count = 0;
    for (int y = 0; y < H; ++y) {
      std::uint64_t* arow = alive.data() + static_cast<std::size_t>(y) * wpr;
      int cy = y + sy;
      if (cy >= H) {
        std::fill(arow, arow + wpr, 0ull);
        continue;
      }
      const std::uint64_t* crow =
          comp.data() + static_cast<std::size_t>(cy) * cpr;
      for (int w = 0; w < wpr; ++w) {
        std::uint64_t v = crow[w + wo] >> bo;
        if (bo) v |= crow[w + wo + 1] << (64 - bo);
        arow[w] &= v;
        alive_count += std::popcount(arow[w]);
      }
    }
    survivors.push_back(alive_count);
    if (alive_count == 0) break;
  }
  return survivors;
}

TimeRecord max_overlap(const SpinConfig& eta, const SpinConfig& sigma,
                       const NestedShapes& shapes, int n) {
  SpinConfig mask = agreement_mask(sigma, eta);
  auto survivors = overlap_survivors(mask, shapes, n);
  TimeRecord rec;
  rec.kind = TimeKind::Overlap;
  rec.window_cap = static_cast<std::uint64_t>(n);
  rec.value = 0;
  for (std::size_t k = 1; k < survivors.size(); ++k)
    if (survivors[k] > 0) rec.value = k;
  rec.censored = (rec.value == static_cast<std::uint64_t>(n));
  return rec;
}

namespace {

// pattern rows as plus-bit rows over the (n+1)-wide cube
std::vector<std::uint64_t> cube_value_rows(const Pattern& a, int side,
                                           int words) {
  std::vector<std::uint64_t> rows(static_cast<std::size_t>(side) * words, 0);
  const Site o = a.origin();
  for (std::size_t i = 0; i < a.support().size(); ++i) {
    if (a.values()[i] <= 0) continue;
    int x = a.support()[i][0] - o[0], y = a.support()[i][1] - o[1];
    rows[static_cast<std::size_t>(y) * words + (x >> 6)] |= 1ull << (x & 63);
  }
  return rows;
}

// any site of the overlap of the cube with its (dx,dy)-shift where the
// pattern disagrees with the shifted pattern
bool shift_disagrees(const std::vector<std::uint64_t>& rows, int side,
                     int words, int dx, int dy) {
  int x0 = std::max(0, dx), x1 = std::min(side - 1, side - 1 + dx);
  int y0 = std::max(0, dy), y1 = std::min(side - 1, side - 1 + dy);
  if (x0 > x1 || y0 > y1) return false;
  // overlap column mask
  std::vector<std::uint64_t> colmask(words, 0);
  for (int x = x0; x <= x1; ++x) colmask[x >> 6] |= 1ull << (x & 63);
  for (int y = y0; y <= y1; ++y) {
    const std::uint64_t* r = &rows[static_cast<std::size_t>(y) * words];
    const std::uint64_t* rs = &rows[static_cast<std::size_t>(y - dy) * words];
    for (int w = 0; w < words; ++w) {
      // bits of the shifted row at columns x: value at (x-dx, y-dy)
      int sx = (w << 6) - dx;  // source bit index of this word's bit 0
      std::uint64_t shifted = 0;
      int swo = sx >> 6, sbo = sx & 63;  // gcc: arithmetic shift floors
      if (swo >= 0 && swo < words) shifted |= rs[swo] >> sbo;
      if (sbo && swo + 1 >= 0 && swo + 1 < words)
        shifted |= rs[swo + 1] << (64 - sbo);
      if ((r[w] ^ shifted) & colmask[w]) return true;
    }
  }
  return false;
}

}  // namespace

GoodnessReport is_good(const Pattern& a) {
  auto n_opt = a.cube_side_index();
  if (!n_opt) throw std::invalid_argument("goodness needs a cube support");
  const int n = *n_opt;
  const int h = (n + 1) / 2 - 1;  // |x| < n/2 on integers: |x| <= ceil(n/2)-1
  GoodnessReport rep;
  rep.is_good = true;
  if (h < 1) return rep;  // no nonzero shifts with |x| < n/2

  const int side = n + 1;
  const int words = (side + 63) / 64;
  auto rows = cube_value_rows(a, side, words);
  for (int dy = -h; dy <= h; ++dy)
    for (int dx = -h; dx <= h; ++dx) {
      if (dx == 0 && dy == 0) continue;
      if (!shift_disagrees(rows, side, words, dx, dy)) {
        rep.is_good = false;
        rep.witness = Site{dx, dy, 0};
        return rep;
      }
    }
  return rep;
}

GoodFractionEstimate good_fraction(int n, double beta, int samples,
                                   std::uint64_t seed, int window_margin) {
  const int side = n + 1 + 2 * window_margin;
  GibbsSpec spec{{side, side}, beta, BoundaryKind::Plus, {}, Convention::Ferro};
  CubeShape center{n, {window_margin, window_margin, 0}, 2};
  int good = 0;
  for (int i = 0; i < samples; ++i) {
    HeatBathSampler sampler(spec, HeatBathOptions{},
                            derive_seed(seed, 0x474f4f44ull, i));
    SpinConfig cfg = sampler.sample_one();
    Pattern a = Pattern::from_window(cfg, center);
    if (is_good(a).is_good) ++good;
  }
  GoodFractionEstimate est;
  est.samples = samples;
  est.fraction = static_cast<double>(good) / samples;
  // Wilson 95%
  double z = 1.959963984540054, nn = samples, p = est.fraction;
  double denom = 1 + z * z / nn;
  double mid = (p + z * z / (2 * nn)) / denom;
  double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
  est.ci_lo = std::max(0.0, mid - half);
  est.ci_hi = std::min(1.0, mid + half);
  return est;
}

double pair_agreement_enumerated(int k, double beta, int window_side) {
  NestedShapes shapes;
  auto [bw, bh] = shapes.bbox(k);
  if (bw > window_side || bh > window_side)
    throw std::invalid_argument("nested shape does not fit the window");
  int nsites = window_side * window_side;
  if (static_cast<std::uint64_t>(nsites) > kEnumerationCap)
    throw std::invalid_argument("window exceeds the enumeration cap");
  GibbsSpec spec{{window_side, window_side}, beta, BoundaryKind::Plus, {},
                 Convention::Ferro};
  ExactDistribution dist = exact_distribution(spec);
  // center the shape, then bucket configuration mass per shape pattern
  int ox = (window_side - bw) / 2, oy = (window_side - bh) / 2;
  std::vector<int> flat;
  for (const Site& s : shapes.prefix(k))
    flat.push_back((s[1] + oy) * window_side + (s[0] + ox));
  std::vector<double> bucket(1ull << k, 0.0);
  for (std::size_t cfg = 0; cfg < dist.prob.size(); ++cfg) {
    std::uint64_t key = 0;
    for (int j = 0; j < k; ++j) key |= ((cfg >> flat[j]) & 1ull) << j;
    bucket[key] += dist.prob[cfg];
  }
  long double f = 0.0;
  for (double b : bucket) f += static_cast<long double>(b) * b;
  return static_cast<double>(f);
}

OverlapThresholds overlap_thresholds(int n_max, double beta, int pairs,
                                     std::uint64_t seed,
                                     OverlapLawSource source,
                                     int estimation_shape_sites,
                                     int enumeration_window) {
  OverlapThresholds out;
  out.source = source;
  NestedShapes shapes;

  if (source == OverlapLawSource::ClosedFormCoins) {
    // iid fair coins: f(k) = 2^-k; thresholds are exact in integer
    // arithmetic (u_n = floor(log2 n), with u_1 = 0)
    int kmax = 64;
    out.f.assign(kmax + 1, 0.0);
    out.f[0] = 1.0;
    for (int k = 1; k <= kmax; ++k) out.f[k] = std::ldexp(1.0, -k);
    out.resolved_k = kmax;
    out.delta_hat = 0.5;
    out.u.assign(n_max + 1, 0);
    for (int n = 1; n <= n_max; ++n) {
      std::uint64_t u = 0;
      while (u + 1 <= 63 && (1ull << (u + 1)) <= static_cast<std::uint64_t>(n))
        ++u;
      out.u[n] = u;
    }
    return out;
  }

  if (source == OverlapLawSource::Enumeration) {
    int kmax = 1;
    while (true) {
      auto [bw, bh] = shapes.bbox(kmax + 1);
      if (bw > enumeration_window || bh > enumeration_window) break;
      if (static_cast<std::uint64_t>(kmax + 1) > 16) break;
      ++kmax;
    }
    out.f.assign(kmax + 1, 0.0);
    out.f[0] = 1.0;
    for (int k = 1; k <= kmax; ++k)
      out.f[k] = pair_agreement_enumerated(k, beta, enumeration_window);
    out.resolved_k = kmax;
  } else {
    // translate-averaged Monte Carlo on independent pairs
    int shape_sites = estimation_shape_sites;
    if (shape_sites <= 0) shape_sites = std::max(n_max, 1024);
    auto [bw, bh] = shapes.bbox(shape_sites);
    const int margin = 12;
    const int side_x = bw + 2 * margin, side_y = bh + 2 * margin;
    GibbsSpec spec{{side_x, side_y}, beta, BoundaryKind::Plus, {},
                   Convention::Ferro};
    std::vector<long double> numer(shape_sites + 1, 0.0);
    std::vector<std::uint64_t> m = shapes.fit_counts(shape_sites);
    for (int i = 0; i < pairs; ++i) {
      HeatBathSampler s1(spec, HeatBathOptions{},
                         derive_seed(seed, 0x554e5f41ull, i));
      HeatBathSampler s2(spec, HeatBathOptions{},
                         derive_seed(seed, 0x554e5f42ull, i));
      SpinConfig a = s1.sample_one(), b = s2.sample_one();
      SpinConfig mask = agreement_mask(a, b);
      // carve the interior region holding the shape bbox
      std::vector<std::int8_t> sub(static_cast<std::size_t>(bw) * bh);
      std::size_t t = 0;
      for (int y = 0; y < bh; ++y)
        for (int x = 0; x < bw; ++x, ++t)
          sub[t] = static_cast<std::int8_t>(mask.spin(x + margin, y + margin));
      SpinConfig inner = SpinConfig::from_field({bw, bh}, sub, BoundaryKind::Free);
      auto surv = overlap_survivors(inner, shapes, shape_sites);
      for (std::size_t k = 1; k < surv.size(); ++k) numer[k] += surv[k];
    }
    out.f.assign(shape_sites + 1, 0.0);
    out.f[0] = 1.0;
    int resolved = 0;
    const double min_events = 5.0;
    for (int k = 1; k <= shape_sites; ++k) {
      if (m[k] == 0) break;
      double denom = static_cast<double>(m[k]) * pairs;
      out.f[k] = static_cast<double>(numer[k]) / denom;
      if (static_cast<double>(numer[k]) >= min_events) resolved = k;
    }
    out.f.resize(resolved + 1);
    out.resolved_k = resolved;
  }

  // isotonize (f is nonincreasing in truth) and read thresholds
  for (std::size_t k = 1; k < out.f.size(); ++k)
    out.f[k] = std::min(out.f[k], out.f[k - 1]);
  out.delta_hat = 1.0;
  for (std::size_t k = 1; k + 1 < out.f.size(); ++k)
    if (out.f[k] > 0 && out.f[k + 1] > 0)
      out.delta_hat = std::min(out.delta_hat, out.f[k + 1] / out.f[k]);

  out.u.assign(n_max + 1, 0);
  for (int n = 1; n <= n_max; ++n) {
    double level = 1.0 / n;
    // u_n = max{k : f(k) >= 1/n}; certain only when f has crossed below
    // the level inside the resolved range (u_1 = 0 needs no crossing)
    if (n > 1 && (out.resolved_k < 1 || out.f[out.resolved_k] >= level))
      throw std::runtime_error(
          "overlap threshold unresolved: f(k) has not crossed 1/n within "
          "the estimated range");
    std::uint64_t u = 0;
    for (int k = 1; k <= out.resolved_k; ++k)
      if (out.f[k] >= level) u = k;
    out.u[n] = u;
  }
  return out;
}

}  // namespace gibbslab
