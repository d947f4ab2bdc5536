// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace rissim {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Counter-based seed derivation. Every consumer of randomness draws from its
/// own stream keyed by (master, stream, counter), so experiment cells stay
/// reproducible and independent without shared generator state.
inline uint64_t derive_seed(uint64_t master, uint64_t stream, uint64_t counter = 0) {
  uint64_t s = splitmix64(master);
  s = splitmix64(s ^ stream);
  s = splitmix64(s ^ counter);
  return s;
}

inline uint64_t derive_seed(uint64_t master, uint64_t stream, uint64_t a, uint64_t b) {
  return splitmix64(derive_seed(master, stream, a) ^ splitmix64(b));
}

/// Seeded generator wrapper used throughout the simulator.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  double gaussian(double stddev) {
    return std::normal_distribution<double>(0.0, stddev)(engine_);
  }

  /// Circularly symmetric complex Gaussian with total variance `var`.
  std::complex<double> cgaussian(double var) {
    const double s = std::sqrt(var / 2.0);
    const double re = gaussian(s);
    const double im = gaussian(s);
    return {re, im};
  }

  /// Uniform integer in [0, bound).
  uint64_t integer(uint64_t bound) {
    return std::uniform_int_distribution<uint64_t>(0, bound - 1)(engine_);
  }

  bool coin(double p) { return uniform() < p; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rissim
