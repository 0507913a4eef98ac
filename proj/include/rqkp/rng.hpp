#pragma once

// Deterministic random draws. std::mt19937_64 has a standard-mandated output
// sequence, but the standard *distributions* do not, so the integer and
// uniform draws below are spelled out explicitly:
//
//   integer in [lo, hi]:  lo + (next() mod (hi - lo + 1))
//   uniform in [0, 1):    (next() >> 11) * 2^-53
//
// The modulo bias is below 2^-57 for the ranges used here and the same on
// every platform, which is what matters: identical seeds give identical
// instances everywhere.

#include <cstdint>
#include <random>

namespace rqkp {

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  long long uniform_int(long long lo, long long hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long long>(next() % span);
  }

  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 eng_;
};

/// Stateless 64-bit mix (splitmix64 finalizer); used to derive independent
/// per-instance seeds from a master seed and a few integer coordinates.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k1,
                                 std::uint64_t k2 = 0, std::uint64_t k3 = 0) {
  std::uint64_t h = mix_seed(master);
  h = mix_seed(h ^ k1);
  h = mix_seed(h ^ k2);
  h = mix_seed(h ^ k3);
  return h;
}

}  // namespace rqkp
