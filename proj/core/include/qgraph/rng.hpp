#pragma once

#include <cstdint>

namespace qgraph {

/// SplitMix64 step; also used to expand seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ with platform-independent output, so simulations are
/// bit-reproducible across compilers. Seeded via SplitMix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  /// Derived seed for one trial of a multi-trial run. The rule is fixed:
  /// stream i of master seed s starts from splitmix64_once(s ^ (i+1)*GOLDEN).
  static std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t x = master_seed ^ ((index + 1) * 0x9E3779B97F4A7C15ULL);
    return splitmix64(x);
  }

  static Rng stream(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(stream_seed(master_seed, index));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [0,n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace qgraph
