#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "gibbslab/lattice.hpp"
#include "gibbslab/patterns.hpp"
#include "gibbslab/rng.hpp"
#include "gibbslab/spin_io.hpp"
#include "support/oracles.hpp"

using namespace gibbslab;

TEST_CASE("cube volume and inner boundary counts") {
  CubeShape c1{1, {0, 0, 0}, 2};
  CHECK(c1.volume() == 4);
  CHECK(inner_boundary(c1.sites(), 2).size() == 4);

  CubeShape c4{4, {0, 0, 0}, 2};
  CHECK(c4.volume() == 25);
  CHECK(inner_boundary(c4.sites(), 2).size() == 25 - 9);  // (n+1)^2-(n-1)^2

  std::vector<Site> single{{0, 0, 0}};
  CHECK(inner_boundary(single, 2).size() == 1);
  CHECK_THROWS(inner_boundary({}, 2));

  for (int n = 1; n <= 7; ++n) {
    CubeShape c{n, {3, -2, 0}, 2};
    auto expect = static_cast<std::size_t>((n + 1) * (n + 1) - (n - 1) * (n - 1));
    CHECK(inner_boundary(c.sites(), 2).size() == expect);
  }
}

TEST_CASE("nested shapes follow the documented spiral") {
  NestedShapes g;
  auto p3 = g.prefix(3);
  CHECK(p3[0] == Site{0, 0, 0});
  CHECK(p3[1] == Site{1, 0, 0});
  CHECK(p3[2] == Site{1, 1, 0});
  auto p4 = g.prefix(4);
  CHECK(p4[3] == Site{0, 1, 0});

  // G_{m^2} is the m x m square
  for (int m : {2, 3, 4, 10}) {
    auto pref = g.prefix(m * m);
    std::set<std::pair<int, int>> got;
    for (const Site& s : pref) got.insert({s[0], s[1]});
    CHECK(static_cast<int>(got.size()) == m * m);
    for (int x = 0; x < m; ++x)
      for (int y = 0; y < m; ++y) CHECK(got.count({x, y}) == 1);
  }
}

TEST_CASE("nested shapes are monotone with exact cardinality") {
  NestedShapes g;
  auto big = g.prefix(10000);
  std::set<std::pair<int, int>> seen;
  for (int k = 1; k <= 10000; ++k) {
    const Site& s = big[k - 1];
    CHECK(seen.count({s[0], s[1]}) == 0);  // growth means G_k superset G_{k-1}
    seen.insert({s[0], s[1]});
  }
  CHECK(seen.size() == 10000);
}

TEST_CASE("cube sequence difference bound |(C_k+x) delta C_k| >= k") {
  for (int k = 1; k <= 100; ++k) {
    CubeShape c{k, {0, 0, 0}, 2};
    std::set<std::pair<int, int>> base;
    for (const Site& s : c.sites()) base.insert({s[0], s[1]});
    for (Site x : {Site{1, 0, 0}, Site{0, 1, 0}, Site{1, 1, 0}, Site{-1, 2, 0}}) {
      std::size_t diff = 0;
      for (const auto& [sx, sy] : base) {
        if (!base.count({sx + x[0], sy + x[1]})) ++diff;  // shifted \ base
        if (!base.count({sx - x[0], sy - x[1]})) ++diff;  // base \ shifted
      }
      CHECK(diff >= static_cast<std::size_t>(k));
    }
  }
}

TEST_CASE("boundary ratio of cubes decreases") {
  double prev = 1.0;
  for (int k = 2; k <= 40; ++k) {
    CubeShape c{k, {0, 0, 0}, 2};
    double ratio = static_cast<double>(inner_boundary(c.sites(), 2).size()) /
                   static_cast<double>(c.volume());
    CHECK(ratio < prev);
    prev = ratio;
  }
}

TEST_CASE("bit-packed store round-trips against the naive site list") {
  Xoshiro256 rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    int w = 1 + static_cast<int>(rng.below(130));
    int h = 1 + static_cast<int>(rng.below(8));
    std::vector<std::int8_t> field(static_cast<std::size_t>(w) * h);
    for (auto& f : field) f = rng.uniform() < 0.5 ? +1 : -1;
    SpinConfig cfg = SpinConfig::from_field({w, h}, field, BoundaryKind::Free);
    auto back = cfg.to_field();
    REQUIRE(back == field);
  }
}

TEST_CASE("spin window file round trip") {
  SpinConfig cfg = oracle::coin_window(37, 9, 7, BoundaryKind::Plus);
  std::stringstream ss;
  write_spin_window(ss, cfg);
  SpinConfig back = read_spin_window(ss);
  CHECK(back == cfg);

  // explicit ring survives too
  std::vector<std::int8_t> ring(ring_site_count({5, 4}));
  Xoshiro256 rng(3);
  for (auto& r : ring) r = rng.uniform() < 0.5 ? +1 : -1;
  SpinConfig ex = SpinConfig::from_field(
      {5, 4}, oracle::coin_window(5, 4, 9).to_field(), BoundaryKind::Explicit,
      ring);
  std::stringstream s2;
  write_spin_window(s2, ex);
  CHECK(read_spin_window(s2) == ex);
}

TEST_CASE("pattern shifts") {
  SpinConfig cfg = oracle::coin_window(8, 8, 11);
  Pattern a = Pattern::from_window(cfg, CubeShape{2, {1, 2, 0}, 2});

  Pattern same = shift_pattern(a, {0, 0, 0});
  CHECK(same == a);

  Pattern moved = shift_pattern(a, {3, 1, 0});
  CHECK(moved.origin() == Site{4, 3, 0});
  for (std::size_t i = 0; i < a.support().size(); ++i)
    CHECK(moved.value_at(a.support()[i] + Site{3, 1, 0}) ==
          a.values()[i]);
  CHECK(shift_pattern(moved, {-3, -1, 0}) == a);
}

TEST_CASE("pattern file round trip") {
  NestedShapes g;
  SpinConfig cfg = oracle::coin_window(9, 9, 5);
  Pattern nested = Pattern::from_nested(cfg, g, 7, {2, 1, 0});
  std::stringstream ss;
  write_pattern(ss, nested);
  Pattern back = read_pattern(ss);
  CHECK(back == nested);
  CHECK(back.kind() == SupportKind::Nested);
}

TEST_CASE("fit counts match the walking definition") {
  NestedShapes g;
  const int n = 40;
  auto counts = g.fit_counts(n);
  auto [W, H] = g.bbox(n);
  for (int k = 1; k <= n; ++k) {
    std::uint64_t direct = 0;
    for (int oy = 0; oy < H; ++oy)
      for (int ox = 0; ox < W; ++ox)
        if (g.fit_prefix(n, {ox, oy, 0}) >= k) ++direct;
    CHECK(counts[k] == direct);
  }
}
