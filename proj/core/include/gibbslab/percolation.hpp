#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gibbslab/gibbs.hpp"
#include "gibbslab/lattice.hpp"
#include "gibbslab/stats.hpp"

namespace gibbslab {

// two independently drawn fields on one volume plus their sitewise
// disagreement mask
struct CouplingSample {
  SpinConfig sigma1;
  SpinConfig sigma2;
  std::vector<std::uint8_t> disagree;  // row-major, 1 = spins differ

  CouplingSample(SpinConfig a, SpinConfig b);
  bool disagrees(int x, int y) const {
    return disagree[static_cast<std::size_t>(y) * sigma1.width() + x] != 0;
  }
};

// nearest-neighbor path of disagreeing sites from some site of W to the
// inner boundary of the volume
bool disagreement_path_exists(const CouplingSample& sample, const CubeShape& w);

struct DisagreementBoundReport {
  double lhs = 0.0;          // max over W-patterns of the marginal gap
  double connection = 0.0;   // MC estimate of the coupled-connection mass
  Interval connection_ci{0, 1};
  std::uint64_t boundary_w = 0;  // |dW|
  bool pass = false;             // lhs <= |dW| * upper CI
  std::size_t pairs = 0;
};

// max_pattern |P^eta(sigma_W) - P^xi(sigma_W)| (exact, both boundary
// conditions enumerated) against |dW| x the coupled path probability
DisagreementBoundReport verify_disagreement_bound(
    const std::vector<int>& volume_extent, const CubeShape& w, double beta,
    BoundaryKind eta, BoundaryKind xi, int pairs, std::uint64_t seed);

struct DecayPoint {
  int distance = 0;
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  double p_hat = 0.0;
  Interval ci{0, 1};
  bool zero = false;  // Clopper-Pearson bound only
};

struct DecayFit {
  double beta = 0.0;
  std::vector<DecayPoint> points;
  double c_hat = 0.0;  // decay rate per unit sup-distance
  double c_se = 0.0;
  double r2 = 0.0;
  int fit_points = 0;
  bool fitted = false;  // at least two resolved distances
};

struct DecayOptions {
  int window_side = 160;
  int w_side = 2;          // side of the probed block W
  int min_hits = 5;        // a distance joins the fit above this
  int burn_in = 150;
  int position_stride = 1; // anchor grid step inside the window interior
};

// probability that a disagreement path connects W to the square ring at
// sup-distance d, translate-averaged over anchor positions; log-linear fit
// of the decay over the supplied distances
DecayFit fit_decay(double beta, const std::vector<int>& distances, int pairs,
                   std::uint64_t seed, const DecayOptions& opt = {});

}  // namespace gibbslab
