#pragma once

// Test-only reference implementations, deliberately naive and independent
// of the bit-packed production paths.

#include <cmath>
#include <set>
#include <vector>

#include "gibbslab/lattice.hpp"
#include "gibbslab/patterns.hpp"
#include "gibbslab/rng.hpp"

namespace oracle {

using gibbslab::CubeShape;
using gibbslab::Pattern;
using gibbslab::Site;
using gibbslab::SpinConfig;

// quadruple-loop occurrence count
inline std::uint64_t naive_count(const Pattern& a, const CubeShape& w,
                                 const SpinConfig& sigma) {
  std::uint64_t count = 0;
  const Site o = a.origin();
  for (int ty = -w.n - 1; ty <= w.n + 1 + w.offset[1]; ++ty)
    for (int tx = -w.n - 1; tx <= w.n + 1 + w.offset[0]; ++tx) {
      bool inside = true, match = true;
      for (std::size_t i = 0; i < a.support().size() && inside; ++i) {
        Site s = a.support()[i];
        int x = s[0] - o[0] + tx, y = s[1] - o[1] + ty;
        if (!w.contains({x, y, 0})) {
          inside = false;
          break;
        }
        if (sigma.spin(x, y) != a.values()[i]) match = false;
      }
      if (inside && match) ++count;
    }
  return count;
}

// first cube level (anchored at `anchor`) containing an occurrence; -1 if
// none at or below cap
inline int naive_first_level(const Pattern& a, const SpinConfig& sigma,
                             const Site& anchor, int cap) {
  for (int k = 0; k <= cap; ++k) {
    CubeShape ck{k, anchor, 2};
    if (naive_count(a, ck, sigma) >= 1) return k;
  }
  return -1;
}

// exhaustive goodness via cylinder compatibility over every short shift
inline bool naive_is_good(const Pattern& a, int n) {
  int h = (n + 1) / 2 - 1;
  const Site o = a.origin();
  auto value = [&](int x, int y) {
    return a.value_at({x + o[0], y + o[1], 0});
  };
  for (int dx = -h; dx <= h; ++dx)
    for (int dy = -h; dy <= h; ++dy) {
      if (dx == 0 && dy == 0) continue;
      bool compatible = true;
      for (int x = 0; x <= n && compatible; ++x)
        for (int y = 0; y <= n; ++y) {
          int px = x - dx, py = y - dy;
          if (px < 0 || px > n || py < 0 || py > n) continue;
          if (value(x, y) != value(px, py)) {
            compatible = false;
            break;
          }
        }
      if (compatible) return false;
    }
  return true;
}

// exhaustive maximal overlap over all (k, x) translate pairs
inline int naive_max_overlap(const SpinConfig& a, const SpinConfig& b,
                             const gibbslab::NestedShapes& shapes, int n) {
  int best = 0;
  for (int k = 1; k <= n; ++k) {
    auto prefix = shapes.prefix(k);
    std::set<std::pair<int, int>> gn;
    for (const Site& s : shapes.prefix(n)) gn.insert({s[0], s[1]});
    bool found = false;
    for (const auto& [ox, oy] : gn) {
      bool ok = true;
      for (const Site& s : prefix) {
        int x = s[0] + ox, y = s[1] + oy;
        if (!gn.count({x, y}) || a.spin(x, y) != b.spin(x, y)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        found = true;
        break;
      }
    }
    if (found) best = k;
  }
  return best;
}

inline SpinConfig coin_window(int w, int h, std::uint64_t seed,
                              gibbslab::BoundaryKind b = gibbslab::BoundaryKind::Free) {
  gibbslab::Xoshiro256 rng(seed);
  std::vector<std::int8_t> field(static_cast<std::size_t>(w) * h);
  for (auto& f : field) f = rng.uniform() < 0.5 ? +1 : -1;
  return SpinConfig::from_field({w, h}, field, b);
}

}  // namespace oracle
