#include "gibbslab/lattice.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

namespace gibbslab {

std::vector<Site> CubeShape::sites() const {
  std::vector<Site> out;
  out.reserve(volume());
  int zmax = dim >= 3 ? n : 0;
  for (int z = 0; z <= zmax; ++z)
    for (int y = 0; y <= n; ++y)
      for (int x = 0; x <= n; ++x)
        out.push_back(Site{x + offset[0], y + offset[1], z + offset[2]});
  return out;
}

std::vector<Site> inner_boundary(const std::vector<Site>& shape, int dim) {
  if (shape.empty()) throw std::invalid_argument("inner_boundary: empty shape");
  std::unordered_set<Site, SiteHash> in(shape.begin(), shape.end());
  std::vector<Site> out;
  for (const Site& s : shape) {
    bool border = false;
    for (int axis = 0; axis < dim && !border; ++axis) {
      for (int sign = -1; sign <= 1 && !border; sign += 2) {
        Site nb = s;
        nb[axis] += sign;
        if (!in.count(nb)) border = true;
      }
    }
    if (border) out.push_back(s);
  }
  return out;
}

std::vector<Site> NestedShapes::spiral(int k) {
  std::vector<Site> sites;
  sites.reserve(k);
  sites.push_back({0, 0, 0});
  int m = 1;
  while (static_cast<int>(sites.size()) < k) {
    for (int y = 0; y <= m && static_cast<int>(sites.size()) < k; ++y)
      sites.push_back({m, y, 0});
    for (int x = m - 1; x >= 0 && static_cast<int>(sites.size()) < k; --x)
      sites.push_back({x, m, 0});
    ++m;
  }
  return sites;
}

void NestedShapes::ensure(int k) const {
  if (k < 1) throw std::invalid_argument("nested shape index must be >= 1");
  if (static_cast<int>(cache_.size()) >= k) return;
  int grow = std::max(k, static_cast<int>(cache_.size()) * 2 + 16);
  cache_ = generator_ ? generator_(grow) : spiral(grow);
  if (static_cast<int>(cache_.size()) < k)
    throw std::runtime_error("nested shape generator produced too few sites");
  bbox_w_.resize(cache_.size());
  bbox_h_.resize(cache_.size());
  int w = 0, h = 0;
  for (std::size_t i = 0; i < cache_.size(); ++i) {
    w = std::max(w, cache_[i][0] + 1);
    h = std::max(h, cache_[i][1] + 1);
    bbox_w_[i] = w;
    bbox_h_[i] = h;
  }
}

std::span<const Site> NestedShapes::prefix(int k) const {
  ensure(k);
  return {cache_.data(), static_cast<std::size_t>(k)};
}

Site NestedShapes::site(int k) const {
  ensure(k);
  return cache_[k - 1];
}

std::pair<int, int> NestedShapes::bbox(int k) const {
  ensure(k);
  return {bbox_w_[k - 1], bbox_h_[k - 1]};
}

int NestedShapes::fit_prefix(int n, const Site& offset) const {
  ensure(n);
  // walk the spiral until a shifted site leaves G_n
  std::span<const Site> gn = prefix(n);
  std::unordered_set<Site, SiteHash> in(gn.begin(), gn.end());
  int j = 0;
  while (j < n && in.count(cache_[j] + offset)) ++j;
  return j;
}

std::vector<std::uint64_t> NestedShapes::fit_counts(int n) const {
  ensure(n);
  auto [W, H] = bbox(n);
  // membership grid for G_n
  std::vector<std::uint8_t> in(static_cast<std::size_t>(W) * H, 0);
  for (const Site& s : prefix(n)) in[static_cast<std::size_t>(s[1]) * W + s[0]] = 1;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n) + 1, 0);
  for (int oy = 0; oy < H; ++oy) {
    for (int ox = 0; ox < W; ++ox) {
      int j = 0;
      while (j < n) {
        int x = cache_[j][0] + ox, y = cache_[j][1] + oy;
        if (x >= W || y >= H || !in[static_cast<std::size_t>(y) * W + x]) break;
        ++j;
      }
      if (j > 0) ++counts[j];
    }
  }
  // counts[j] currently holds #offsets with fit == j; convert to fit >= k
  for (int k = n - 1; k >= 1; --k) counts[k] += counts[k + 1];
  counts[0] = static_cast<std::uint64_t>(W) * H;
  return counts;
}

const char* to_string(BoundaryKind b) {
  switch (b) {
    case BoundaryKind::Plus: return "plus";
    case BoundaryKind::Minus: return "minus";
    case BoundaryKind::Free: return "free";
    case BoundaryKind::Explicit: return "explicit";
  }
  return "?";
}

BoundaryKind boundary_from_string(const std::string& tag) {
  if (tag == "plus") return BoundaryKind::Plus;
  if (tag == "minus") return BoundaryKind::Minus;
  if (tag == "free") return BoundaryKind::Free;
  if (tag == "explicit") return BoundaryKind::Explicit;
  throw std::invalid_argument("unknown boundary tag: " + tag);
}

std::size_t ring_site_count(const std::vector<int>& extent) {
  if (extent.size() != 2)
    throw std::invalid_argument("explicit boundaries are d=2 only");
  return 2 * static_cast<std::size_t>(extent[0]) + 2 * static_cast<std::size_t>(extent[1]);
}

std::size_t ring_index(const std::vector<int>& extent, const Site& s) {
  const int W = extent[0], H = extent[1];
  if (s[1] == -1 && s[0] >= 0 && s[0] < W) return s[0];
  if (s[1] == H && s[0] >= 0 && s[0] < W) return W + s[0];
  if (s[0] == -1 && s[1] >= 0 && s[1] < H) return 2 * W + s[1];
  if (s[0] == W && s[1] >= 0 && s[1] < H) return 2 * W + H + s[1];
  throw std::invalid_argument("site is not on the outer ring");
}

SpinConfig::SpinConfig(std::vector<int> extent, BoundaryKind boundary,
                       std::vector<std::int8_t> explicit_ring)
    : extent_(std::move(extent)), boundary_(boundary), ring_(std::move(explicit_ring)) {
  if (extent_.empty() || extent_.size() > 3)
    throw std::invalid_argument("extent must have 1..3 dimensions");
  for (int e : extent_)
    if (e <= 0) throw std::invalid_argument("extent entries must be positive");
  if (boundary_ == BoundaryKind::Explicit &&
      ring_.size() != ring_site_count(extent_))
    throw std::invalid_argument("explicit ring has wrong size");
  words_per_row_ = (extent_[0] + 63) / 64;
  words_.assign(static_cast<std::size_t>(words_per_row_) * height() * depth(), 0);
}

SpinConfig SpinConfig::from_field(std::vector<int> extent,
                                  std::span<const std::int8_t> field,
                                  BoundaryKind boundary,
                                  std::vector<std::int8_t> explicit_ring) {
  SpinConfig cfg(std::move(extent), boundary, std::move(explicit_ring));
  if (field.size() != cfg.site_count())
    throw std::invalid_argument("field size does not match extent");
  std::size_t i = 0;
  for (int z = 0; z < cfg.depth(); ++z)
    for (int y = 0; y < cfg.height(); ++y) {
      std::uint64_t* row = const_cast<std::uint64_t*>(cfg.row_ptr(y, z));
      for (int x = 0; x < cfg.width(); ++x, ++i)
        if (field[i] > 0) row[x >> 6] |= 1ull << (x & 63);
    }
  return cfg;
}

std::uint64_t SpinConfig::site_count() const {
  std::uint64_t v = 1;
  for (int e : extent_) v *= static_cast<std::uint64_t>(e);
  return v;
}

int SpinConfig::boundary_spin(const Site& s, int axis, int sign) const {
  switch (boundary_) {
    case BoundaryKind::Plus: return +1;
    case BoundaryKind::Minus: return -1;
    case BoundaryKind::Free: return 0;
    case BoundaryKind::Explicit: {
      Site out = s;
      out[axis] += sign;
      return ring_[ring_index(extent_, out)];
    }
  }
  return 0;
}

std::vector<std::int8_t> SpinConfig::to_field() const {
  std::vector<std::int8_t> field;
  field.reserve(site_count());
  for (int z = 0; z < depth(); ++z)
    for (int y = 0; y < height(); ++y)
      for (int x = 0; x < width(); ++x)
        field.push_back(static_cast<std::int8_t>(spin(x, y, z)));
  return field;
}

}  // namespace gibbslab
