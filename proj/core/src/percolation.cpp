#include "gibbslab/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "gibbslab/patterns.hpp"

namespace gibbslab {

CouplingSample::CouplingSample(SpinConfig a, SpinConfig b)
    : sigma1(std::move(a)), sigma2(std::move(b)) {
  if (sigma1.extent() != sigma2.extent())
    throw std::invalid_argument("coupling needs one common volume");
  const int W = sigma1.width(), H = sigma1.height();
  disagree.assign(static_cast<std::size_t>(W) * H, 0);
  for (int y = 0; y < H; ++y) {
    const std::uint64_t* r1 = sigma1.row_ptr(y);
    const std::uint64_t* r2 = sigma2.row_ptr(y);
    for (int x = 0; x < W; ++x)
      disagree[static_cast<std::size_t>(y) * W + x] =
          ((r1[x >> 6] ^ r2[x >> 6]) >> (x & 63)) & 1u;
  }
}

bool disagreement_path_exists(const CouplingSample& sample, const CubeShape& w) {
  const int W = sample.sigma1.width(), H = sample.sigma1.height();
  for (int i = 0; i < 2; ++i) {
    if (w.offset[i] < 0) throw std::invalid_argument("W outside the volume");
    if (w.offset[i] + w.n >= sample.sigma1.extent()[i])
      throw std::invalid_argument("W outside the volume");
  }
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(W) * H, 0);
  std::queue<std::pair<int, int>> q;
  for (int y = w.offset[1]; y <= w.offset[1] + w.n; ++y)
    for (int x = w.offset[0]; x <= w.offset[0] + w.n; ++x)
      if (sample.disagrees(x, y)) {
        seen[static_cast<std::size_t>(y) * W + x] = 1;
        q.emplace(x, y);
      }
  const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop();
    if (x == 0 || x == W - 1 || y == 0 || y == H - 1) return true;
    for (int k = 0; k < 4; ++k) {
      int nx = x + dx[k], ny = y + dy[k];
      std::size_t i = static_cast<std::size_t>(ny) * W + nx;
      if (!seen[i] && sample.disagrees(nx, ny)) {
        seen[i] = 1;
        q.emplace(nx, ny);
      }
    }
  }
  return false;
}

DisagreementBoundReport verify_disagreement_bound(
    const std::vector<int>& volume_extent, const CubeShape& w, double beta,
    BoundaryKind eta, BoundaryKind xi, int pairs, std::uint64_t seed) {
  GibbsSpec spec_eta{volume_extent, beta, eta, {}, Convention::Ferro};
  GibbsSpec spec_xi{volume_extent, beta, xi, {}, Convention::Ferro};
  ExactDistribution d_eta = exact_distribution(spec_eta);
  ExactDistribution d_xi = exact_distribution(spec_xi);

  // W-pattern marginals by masking flat site bits
  std::vector<int> flat;
  for (int y = w.offset[1]; y <= w.offset[1] + w.n; ++y)
    for (int x = w.offset[0]; x <= w.offset[0] + w.n; ++x)
      flat.push_back(y * volume_extent[0] + x);
  const std::size_t nw = flat.size();
  std::vector<double> m_eta(1ull << nw, 0.0), m_xi(1ull << nw, 0.0);
  for (std::size_t cfg = 0; cfg < d_eta.prob.size(); ++cfg) {
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < nw; ++j) key |= ((cfg >> flat[j]) & 1ull) << j;
    m_eta[key] += d_eta.prob[cfg];
    m_xi[key] += d_xi.prob[cfg];
  }
  DisagreementBoundReport rep;
  for (std::size_t k = 0; k < m_eta.size(); ++k)
    rep.lhs = std::max(rep.lhs, std::fabs(m_eta[k] - m_xi[k]));
  rep.boundary_w = inner_boundary(w.sites(), 2).size();

  ExactSampler s_eta(spec_eta), s_xi(spec_xi);
  Xoshiro256 rng(derive_seed(seed, 0x44495341ull, 0));
  std::uint64_t hits = 0;
  for (int i = 0; i < pairs; ++i) {
    CouplingSample cs(s_eta.sample(rng), s_xi.sample(rng));
    if (disagreement_path_exists(cs, w)) ++hits;
  }
  rep.pairs = pairs;
  rep.connection = static_cast<double>(hits) / pairs;
  rep.connection_ci = clopper_pearson(hits, pairs);
  rep.pass = rep.lhs <= rep.boundary_w * rep.connection_ci.hi + 1e-12;
  return rep;
}

namespace {

// largest sup-distance from the block W reached by the disagreement
// cluster touching W; -1 when W carries no disagreement
int disagreement_reach(const std::vector<std::uint8_t>& mask, int W, int H,
                       int x0, int y0, int c, int dmax,
                       std::vector<int>& stamp, int token,
                       std::vector<std::pair<int, int>>& stack) {
  int reach = -1;
  stack.clear();
  for (int y = y0; y < y0 + c; ++y)
    for (int x = x0; x < x0 + c; ++x)
      if (mask[static_cast<std::size_t>(y) * W + x]) {
        stamp[static_cast<std::size_t>(y) * W + x] = token;
        stack.emplace_back(x, y);
        reach = 0;
      }
  const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    int d = std::max({x0 - x, x - (x0 + c - 1), y0 - y, y - (y0 + c - 1), 0});
    reach = std::max(reach, d);
    if (d >= dmax) {
      // anything farther cannot matter for the probed distances
      continue;
    }
    for (int k = 0; k < 4; ++k) {
      int nx = x + dx[k], ny = y + dy[k];
      if (nx < 0 || nx >= W || ny < 0 || ny >= H) continue;
      std::size_t i = static_cast<std::size_t>(ny) * W + nx;
      if (stamp[i] != token && mask[i]) {
        stamp[i] = token;
        stack.emplace_back(nx, ny);
      }
    }
  }
  return reach;
}

}  // namespace

DecayFit fit_decay(double beta, const std::vector<int>& distances, int pairs,
                   std::uint64_t seed, const DecayOptions& opt) {
  for (int d : distances)
    if (d < 2) throw std::invalid_argument("decay distances start at 2");
  const int dmax = *std::max_element(distances.begin(), distances.end());
  const int L = opt.window_side;
  GibbsSpec spec{{L, L}, beta, BoundaryKind::Plus, {}, Convention::Ferro};

  std::vector<std::uint64_t> hits(dmax + 1, 0);
  std::uint64_t trials = 0;
  std::vector<int> stamp(static_cast<std::size_t>(L) * L, -1);
  std::vector<std::pair<int, int>> stack;
  int token_counter = 0;
  const int lo = dmax + 6, hi_x = L - dmax - opt.w_side - 6;
  for (int i = 0; i < pairs; ++i) {
    HeatBathSampler s1(spec, HeatBathOptions{opt.burn_in, 8},
                       derive_seed(seed, 0x44435931ull, i));
    HeatBathSampler s2(spec, HeatBathOptions{opt.burn_in, 8},
                       derive_seed(seed, 0x44435932ull, i));
    SpinConfig a = s1.sample_one(), b = s2.sample_one();
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(L) * L, 0);
    for (int y = 0; y < L; ++y)
      for (int x = 0; x < L; ++x)
        mask[static_cast<std::size_t>(y) * L + x] =
            static_cast<std::uint8_t>(a.spin(x, y) != b.spin(x, y));
    for (int y0 = lo; y0 <= hi_x; y0 += opt.position_stride)
      for (int x0 = lo; x0 <= hi_x; x0 += opt.position_stride) {
        ++trials;
        // cheap skip: most anchors hold no disagreement at low temperature
        bool any = false;
        for (int y = y0; y < y0 + opt.w_side && !any; ++y)
          for (int x = x0; x < x0 + opt.w_side; ++x)
            if (mask[static_cast<std::size_t>(y) * L + x]) {
              any = true;
              break;
            }
        if (!any) continue;
        int reach = disagreement_reach(mask, L, L, x0, y0, opt.w_side, dmax,
                                       stamp, ++token_counter, stack);
        for (int d : distances)
          if (reach >= d) ++hits[d];
      }
  }

  DecayFit fit;
  fit.beta = beta;
  std::vector<double> xs, ys, ws;
  for (int d : distances) {
    DecayPoint pt;
    pt.distance = d;
    pt.hits = hits[d];
    pt.trials = trials;
    pt.p_hat = trials ? static_cast<double>(hits[d]) / trials : 0.0;
    pt.ci = clopper_pearson(hits[d], trials);
    pt.zero = hits[d] == 0;
    fit.points.push_back(pt);
    if (static_cast<int>(hits[d]) >= opt.min_hits) {
      xs.push_back(d);
      ys.push_back(std::log(pt.p_hat));
      ws.push_back(static_cast<double>(hits[d]));  // ~1/Var(log p_hat)
    }
  }
  fit.fit_points = static_cast<int>(xs.size());
  if (fit.fit_points >= 2) {
    LinearFit lf = weighted_linear_fit(xs, ys, ws);
    fit.c_hat = -lf.slope;
    fit.c_se = lf.slope_se;
    fit.r2 = lf.r2;
    fit.fitted = true;
  }
  return fit;
}

}  // namespace gibbslab
