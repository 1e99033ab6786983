#pragma once

#include <cstdint>
#include <random>

#include "gridbesov/rational.hpp"

namespace gb {

// Deterministic across platforms: raw mt19937_64 draws only, no
// std::uniform_* distributions (their output is implementation-defined).
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next() { return eng_(); }

  /// Uniform in [0, n). Modulo bias is irrelevant here; determinism is not.
  uint64_t below(uint64_t n) { return n ? eng_() % n : 0; }

  /// Uniform rational k/den with k in [-den, den].
  Rational signed_unit(long den = 64) {
    long k = static_cast<long>(below(2 * static_cast<uint64_t>(den) + 1)) - den;
    return rat(k, den);
  }

  /// Uniform rational in [0,1] with denominator den.
  Rational unit(long den = 4096) { return rat(static_cast<long>(below(den + 1)), den); }

  double unit_d() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 eng_;
};

/// Stream seed for (experiment seed, trial index, purpose salt); splitmix64 mix.
inline uint64_t stream_seed(uint64_t seed, uint64_t trial, uint64_t salt = 0) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1) + 0xbf58476d1ce4e5b9ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace gb
