#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace gibbslab {

// Lattice sites live in Z^d, d in {2,3}. Unused coordinates stay 0 so a
// Site can be hashed and compared uniformly.
using Site = std::array<int, 3>;

inline Site make_site(int x, int y, int z = 0) { return {x, y, z}; }

inline int sup_norm(const Site& s) {
  int m = s[0] < 0 ? -s[0] : s[0];
  for (int i = 1; i < 3; ++i) {
    int a = s[i] < 0 ? -s[i] : s[i];
    if (a > m) m = a;
  }
  return m;
}

inline Site operator+(const Site& a, const Site& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Site operator-(const Site& a, const Site& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

struct SiteHash {
  std::size_t operator()(const Site& s) const {
    std::uint64_t h = static_cast<std::uint32_t>(s[0]);
    h = h * 0x9e3779b97f4a7c15ull + static_cast<std::uint32_t>(s[1]);
    h = h * 0x9e3779b97f4a7c15ull + static_cast<std::uint32_t>(s[2]);
    h ^= h >> 29;
    return static_cast<std::size_t>(h * 0xbf58476d1ce4e5b9ull);
  }
};

// C(x,n) = ([0,n]^d + x) with (n+1)^d sites.
struct CubeShape {
  int n = 0;
  Site offset{0, 0, 0};
  int dim = 2;

  std::uint64_t volume() const {
    std::uint64_t v = 1;
    for (int i = 0; i < dim; ++i) v *= static_cast<std::uint64_t>(n + 1);
    return v;
  }
  std::vector<Site> sites() const;
  bool contains(const Site& s) const {
    for (int i = 0; i < dim; ++i) {
      int c = s[i] - offset[i];
      if (c < 0 || c > n) return false;
    }
    for (int i = dim; i < 3; ++i)
      if (s[i] != offset[i]) return false;
    return true;
  }
};

// Sites of V having at least one nearest neighbor outside V.
std::vector<Site> inner_boundary(const std::vector<Site>& shape, int dim);

// Growing volume sequence V_k. Default: cubes C_k anchored at the origin of
// the positive quadrant.
struct CubeSequence {
  int dim = 2;
  Site anchor{0, 0, 0};

  CubeShape shape(int k) const { return CubeShape{k, anchor, dim}; }
  std::uint64_t volume(int k) const { return shape(k).volume(); }
};

// Nested simply connected shapes G_k with |G_k| = k, G_{m^2} equal to the
// m x m square. Sites are produced shell by shell: from the m x m square,
// append column x=m bottom-up, then row y=m right-to-left, so
// G_1={(0,0)}, G_2=+(1,0), G_3=+(1,1), G_4=+(0,1), G_9 = 3x3, ...
// The fill rule is pluggable; everything downstream only uses the prefix
// property G_k = first k sites.
class NestedShapes {
 public:
  using Generator = std::function<std::vector<Site>(int)>;

  NestedShapes() = default;
  explicit NestedShapes(Generator g) : generator_(std::move(g)) {}

  // first k sites (k >= 1)
  std::span<const Site> prefix(int k) const;
  Site site(int k) const;  // k-th added site, 1-based

  // bounding box of G_k (width, height)
  std::pair<int, int> bbox(int k) const;

  // largest j such that G_j + offset fits inside G_n; 0 if none
  int fit_prefix(int n, const Site& offset) const;

  // number of offsets x with G_k + x inside G_n
  std::vector<std::uint64_t> fit_counts(int n) const;

 private:
  void ensure(int k) const;
  static std::vector<Site> spiral(int k);

  Generator generator_;                 // optional override
  mutable std::vector<Site> cache_;     // spiral prefix cache
  mutable std::vector<int> bbox_w_, bbox_h_;
};

enum class BoundaryKind : std::uint8_t { Plus, Minus, Free, Explicit };

const char* to_string(BoundaryKind b);
BoundaryKind boundary_from_string(const std::string& tag);

// Finite rectangular window of +-1 spins, bit-packed 64 per word with rows
// padded to whole words (bit set = plus). Immutable after construction;
// samplers work on plain int8 fields and freeze the result.
class SpinConfig {
 public:
  SpinConfig(std::vector<int> extent, BoundaryKind boundary,
             std::vector<std::int8_t> explicit_ring = {});

  static SpinConfig from_field(std::vector<int> extent,
                               std::span<const std::int8_t> field,
                               BoundaryKind boundary,
                               std::vector<std::int8_t> explicit_ring = {});

  int dim() const { return static_cast<int>(extent_.size()); }
  const std::vector<int>& extent() const { return extent_; }
  int width() const { return extent_[0]; }
  int height() const { return dim() >= 2 ? extent_[1] : 1; }
  int depth() const { return dim() >= 3 ? extent_[2] : 1; }
  std::uint64_t site_count() const;

  BoundaryKind boundary() const { return boundary_; }
  const std::vector<std::int8_t>& explicit_ring() const { return ring_; }

  // boundary spin just outside the window, next to interior site s in
  // direction (axis, sign); only meaningful when s is on the border
  int boundary_spin(const Site& s, int axis, int sign) const;

  int spin(int x, int y, int z = 0) const {
    const std::uint64_t* row = row_ptr(y, z);
    return (row[x >> 6] >> (x & 63)) & 1u ? +1 : -1;
  }
  int spin(const Site& s) const { return spin(s[0], s[1], s[2]); }

  int words_per_row() const { return words_per_row_; }
  const std::uint64_t* row_ptr(int y, int z = 0) const {
    return words_.data() +
           static_cast<std::size_t>(z * height() + y) * words_per_row_;
  }

  std::vector<std::int8_t> to_field() const;  // row-major +-1 field

  bool operator==(const SpinConfig& other) const = default;

 private:
  std::vector<int> extent_;
  int words_per_row_ = 0;
  std::vector<std::uint64_t> words_;
  BoundaryKind boundary_ = BoundaryKind::Free;
  std::vector<std::int8_t> ring_;  // Explicit only; see ring_site_count
  friend class SpinField;
};

// Outer-layer site count for Explicit boundaries on a d=2 window (sites
// adjacent to the window across an edge; corners excluded). Ring order:
// y=-1 row, y=H row, x=-1 column, x=W column.
std::size_t ring_site_count(const std::vector<int>& extent);
std::size_t ring_index(const std::vector<int>& extent, const Site& outside);

}  // namespace gibbslab
