#pragma once

#include <cstdint>
#include <string>

#include "dsf/matrix.hpp"

namespace dsf {

// Deterministic 64-bit PRNG (splitmix64). Same seed, same build: same stream.
// split(purpose) derives an independent child stream so that each consumer
// (process noise, measurement noise, initial draw, ...) owns its own sequence
// and cannot perturb the others' draws.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  static const char* algorithm() { return "splitmix64"; }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform on (0, 1]; never returns 0 so log() in Box-Muller stays finite.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double next_in(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the paired draw is cached.
  double next_normal();

  // Independent child stream for the given purpose tag.
  RandomStream split(std::uint64_t purpose) const;

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Draws x ~ N(0, cov): standard normals colored by the lower Cholesky factor
// of cov. Throws NumericError when cov has no such factor (not SPD).
Matrix gaussian_vector(RandomStream& rng, const Matrix& cov);

// Lower Cholesky factor L with cov = L*L^T; strict positive pivots required.
Matrix cholesky(const Matrix& cov);

}  // namespace dsf
