#pragma once

#include <cstdint>

namespace gibbslab {

// splitmix64 step (Steele/Lea/Flood constants). Also used as the keyed hash
// in the seed-splitting contract below.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t hash64(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64(s);
}

// Seed-splitting contract (reproducible across machines, documented in the
// README): replica `index` of logical stream `stream` uses
//   derive_seed(master, stream, index)
//     = splitmix64 applied twice to (master ^ splitmix64(stream)) + index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
  std::uint64_t s = master ^ hash64(stream ^ 0xa0761d6478bd642full);
  s += index * 0x9e3779b97f4a7c15ull;
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b << 1);
}

// xoshiro256++ (Blackman/Vigna). State seeded through splitmix64 so any
// 64-bit seed is valid.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed = 1) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ull; }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform in [0,1), 53-bit resolution
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n) by rejection-free multiply-shift (bias < 2^-64)
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

// Counter-based uniform: a pure function of (key, counter). Coupling-from-
// the-past revisits past epochs and must see identical randomness, so the
// per-(sweep,site) draw is re-derived rather than stored.
inline double counter_uniform(std::uint64_t key, std::uint64_t counter) {
  std::uint64_t s = key ^ (counter * 0xd1342543de82ef95ull);
  std::uint64_t z = splitmix64(s);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace gibbslab
