#pragma once

// Counter-based pseudo-random streams. The generator is SplitMix64
// (Steele, Lea & Flood's mix over a Weyl sequence with increment
// 0x9E3779B97F4A7C15): state_i = seed + i * gamma, output = finalizer(state_i).
// It is seedable, splittable by re-mixing, and platform-independent, which is
// what makes every replication in the harness bit-reproducible.

#include <cstdint>

namespace masskit {

class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in the open interval (0, 1).
  double next_open() {
    double u;
    do {
      u = next_double();
    } while (u == 0.0);
    return u;
  }

  /// Uniform index in [0, bound) via 128-bit multiply-shift.
  uint64_t next_below(uint64_t bound) {
    return static_cast<uint64_t>(
        (static_cast<__uint128_t>(next_u64()) * bound) >> 64);
  }

  double next_gaussian();
  /// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 boosted through
  /// Gamma(shape+1) * U^(1/shape).
  double next_gamma(double shape);

 private:
  uint64_t state_;
};

/// Avalanche-combine two words into a derived stream seed. Chaining mix()
/// calls is the documented split function for harness seeding: independent
/// purposes get distinct constants, replications get their index.
inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream purposes used by the harness seed derivation.
enum : uint64_t {
  kStreamDistribution = 0xD157,
  kStreamSample = 0x5A3B,
  kStreamGa = 0x6A01,
  kStreamExtension = 0xE47,
  kStreamMonteCarlo = 0x3C4D,
};

}  // namespace masskit
