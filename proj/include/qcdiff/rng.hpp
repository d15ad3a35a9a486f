#ifndef QCDIFF_RNG_HPP
#define QCDIFF_RNG_HPP

#include <cstdint>

namespace qcdiff {

/// splitmix64 (Steele/Lea/Flood 2014).  Chosen as the single named generator
/// behind every seeded operation: trivial to reimplement bit-exactly in any
/// language, so seeded runs are reproducible outside this codebase too.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0,1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n); n must be > 0.  Rejection-free modulo is fine
  /// here (desk-scale statistics, not cryptography).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace qcdiff

#endif  // QCDIFF_RNG_HPP
