#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gibbslab/gibbs.hpp"
#include "gibbslab/lattice.hpp"

namespace gibbslab {

enum class SupportKind : std::uint8_t { Cube, Nested, Mask };

// A spin assignment on a finite support. Identified with its cylinder: the
// event that a configuration agrees with it on every support site.
class Pattern {
 public:
  Pattern(std::vector<Site> support, std::vector<std::int8_t> values,
          SupportKind kind = SupportKind::Mask);

  // pattern = sigma restricted to C(anchor, n)
  static Pattern from_window(const SpinConfig& sigma, const CubeShape& cube);
  static Pattern cube_constant(int n, int spin, int dim = 2);
  static Pattern from_rows(const std::vector<std::string>& rows);  // '+','-'
  // pattern = eta restricted to the nested shape G_k (+ offset)
  static Pattern from_nested(const SpinConfig& eta, const NestedShapes& shapes,
                             int k, Site offset = {0, 0, 0});

  const std::vector<Site>& support() const { return support_; }
  const std::vector<std::int8_t>& values() const { return values_; }
  SupportKind kind() const { return kind_; }
  int dim() const { return dim_; }
  std::size_t size() const { return support_.size(); }

  // lower corner and bounding-box size of the support
  Site origin() const { return origin_; }
  Site bbox() const { return bbox_; }

  // support is exactly C(origin, n) for some n
  std::optional<int> cube_side_index() const;

  int value_at(const Site& s) const;  // throws if s not in support

  Pattern shifted(const Site& x) const;
  bool operator==(const Pattern& other) const;

 private:
  std::vector<Site> support_;
  std::vector<std::int8_t> values_;
  SupportKind kind_;
  int dim_;
  Site origin_{0, 0, 0}, bbox_{0, 0, 0};
  friend class PatternScanner;
};

Pattern shift_pattern(const Pattern& a, const Site& x);

// All translate positions of a pattern inside a window, word-parallel over
// 64 x-positions at a time. Position (x,y) means the pattern's bounding box
// is anchored at (x,y), i.e. the occurrence is at translate (x,y)-origin.
class OccurrenceBitmap {
 public:
  OccurrenceBitmap(int xs, int ys) : xs_(xs), ys_(ys), wpr_((xs + 63) / 64),
      bits_(static_cast<std::size_t>(std::max(ys, 0)) * wpr_, 0) {}

  int x_range() const { return xs_; }  // valid anchors: 0 <= x < xs
  int y_range() const { return ys_; }
  bool test(int x, int y) const {
    return (row(y)[x >> 6] >> (x & 63)) & 1u;
  }
  std::uint64_t* row(int y) { return bits_.data() + static_cast<std::size_t>(y) * wpr_; }
  const std::uint64_t* row(int y) const {
    return bits_.data() + static_cast<std::size_t>(y) * wpr_;
  }
  int words_per_row() const { return wpr_; }

  std::uint64_t count() const;
  // number of anchors with x <= xmax and y <= ymax
  std::uint64_t count_upto(int xmax, int ymax) const;
  // sorted max(x,y) values of all anchors (ascending); drives the cube
  // hitting scans
  std::vector<int> anchor_levels() const;

 private:
  int xs_, ys_, wpr_;
  std::vector<std::uint64_t> bits_;
};

// Bit-sliding scanner over a packed window (d=2).
class PatternScanner {
 public:
  explicit PatternScanner(const Pattern& pattern);

  // anchors over the whole window
  OccurrenceBitmap scan(const SpinConfig& window) const;
  // deterministic count of occurrences of the pattern inside sub-window W
  // (every translate of the support contained in W and agreeing)
  std::uint64_t count_occurrences(const SpinConfig& window,
                                  const CubeShape& w) const;
  bool matches_at(const SpinConfig& window, int x, int y) const;

  const Pattern& pattern() const { return pattern_; }

 private:
  struct RowOp {
    int dy;
    int dx;      // bit offset within the row
    bool plus;   // required spin
  };
  Pattern pattern_;
  std::vector<RowOp> ops_;
  int bw_, bh_;
};

std::uint64_t count_occurrences(const Pattern& a, const CubeShape& w,
                                const SpinConfig& sigma);

enum class TimeKind : std::uint8_t {
  Occurrence,
  Return,
  Waiting,
  Matching,
  Overlap,
  PthOccurrence,
};

const char* to_string(TimeKind k);

// One measured functional value. `value` is a volume |V_k| (or a site
// count for Overlap); censored records carry the cap volume.
struct TimeRecord {
  TimeKind kind = TimeKind::Occurrence;
  std::uint64_t value = 0;
  bool censored = false;
  std::uint64_t window_cap = 0;  // |V_cap|
  double normalizer = 0.0;       // P(A) or the pair-agreement probability
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  int level = 0;  // p for PthOccurrence
};

// T = volume of the first cube C_k (k <= cap, anchored per seq) containing
// an occurrence of A.
TimeRecord occurrence_time(const Pattern& a, const SpinConfig& sigma,
                           const CubeSequence& seq, int cap);

// R = volume of the first cube with a second occurrence; requires
// sigma to realize A on the anchored cube (pair with conditional_sample).
TimeRecord return_time(const Pattern& a, const SpinConfig& sigma,
                       const CubeSequence& seq, int cap);

// W = occurrence time, in sigma, of the pattern eta carries on C_n.
TimeRecord waiting_time(const SpinConfig& eta, const SpinConfig& sigma, int n,
                        const CubeSequence& seq, int cap);

// bitwise agreement mask of two windows on a common extent (+ = agree)
SpinConfig agreement_mask(const SpinConfig& sigma, const SpinConfig& eta);

// M = volume of the first cube containing a translate of C_n on which the
// two windows agree sitewise.
TimeRecord matching_time(const SpinConfig& sigma, const SpinConfig& eta, int n,
                         const CubeSequence& seq, int cap);

// T^1 <= ... <= T^p occurrence levels; censored per level.
std::vector<TimeRecord> pth_occurrence_times(const Pattern& a,
                                             const SpinConfig& sigma, int p_max,
                                             const CubeSequence& seq, int cap);

// Largest k such that some translate of G_k inside G_n carries sitewise
// agreement; 0 when even single sites disagree everywhere.
TimeRecord max_overlap(const SpinConfig& eta, const SpinConfig& sigma,
                       const NestedShapes& shapes, int n);

// Per-prefix survivor counts of the nested-overlap walk: alive[k] = number
// of offsets x with G_k + x inside G_n and agreement on G_k + x. alive[0]
// is the total offset count; max overlap = largest k with alive[k] > 0.
std::vector<std::uint64_t> overlap_survivors(const SpinConfig& mask,
                                             const NestedShapes& shapes, int n);

struct GoodnessReport {
  bool is_good = false;
  std::optional<Site> witness;  // compatible self-shift, when not good
};

// A pattern on C_n is good when every nonzero shift with |x| < n/2 (sup
// norm, integer reading |x| <= ceil(n/2)-1) forces a disagreement on the
// overlap of the supports. Good patterns cannot repeat at short range.
GoodnessReport is_good(const Pattern& a);

struct GoodFractionEstimate {
  double fraction = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;  // Wilson 95%
  int samples = 0;
};

// Monte Carlo mass of good patterns: sample sigma, classify sigma_{C_n}.
GoodFractionEstimate good_fraction(int n, double beta, int samples,
                                   std::uint64_t seed, int window_margin = 12);

enum class OverlapLawSource : std::uint8_t {
  ClosedFormCoins,  // beta = 0: f(k) = 2^-k exactly
  MonteCarlo,
  Enumeration,  // small k on an enumerable window with plus boundary
};

struct OverlapThresholds {
  std::vector<double> f;        // f[k], k >= 1; f[0] = 1
  std::vector<std::uint64_t> u; // u[n], n >= 1 (index 0 unused)
  double delta_hat = 0.0;       // min observed consecutive ratio
  int resolved_k = 0;           // largest k with a usable estimate
  OverlapLawSource source = OverlapLawSource::MonteCarlo;
};

// f(k) = P(x)P(two independent samples agree on G_k) and the threshold
// sequence u_n = max{k : f(k) >= 1/n} (u_1 = 0 by the empty-set
// convention). Throws when the requested levels 1/n are below the
// resolution of the estimate.
OverlapThresholds overlap_thresholds(int n_max, double beta, int pairs,
                                     std::uint64_t seed,
                                     OverlapLawSource source,
                                     int estimation_shape_sites = 0,
                                     int enumeration_window = 5);

// f(k) by full enumeration on a small window with plus boundary
// (sum over patterns of the squared marginal).
double pair_agreement_enumerated(int k, double beta, int window_side);

}  // namespace gibbslab
