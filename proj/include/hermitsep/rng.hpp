#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "hermitsep/types.hpp"

namespace hermitsep {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Mixes a seed with a tag, for deriving independent sub-streams.
inline std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + tag * 0xda942042e4dd58b5ULL);
  return splitmix64(s);
}

/// Deterministic generator used everywhere randomness is needed.  The output
/// stream depends only on the seed, not on the platform's distribution
/// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x853c49e6748fea9bULL) {
    // warm up so nearby seeds decorrelate
    splitmix64(state_);
    splitmix64(state_);
  }

  std::uint64_t nextU64() { return splitmix64(state_); }

  /// Uniform in (0, 1].
  double uniform01() {
    return (static_cast<double>(nextU64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double gaussian() {
    if (haveSpare_) {
      haveSpare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    haveSpare_ = true;
    return r * std::cos(t);
  }

  Complex gaussianComplex() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im) / std::sqrt(2.0);
  }

 private:
  std::uint64_t state_;
  bool haveSpare_ = false;
  double spare_ = 0.0;
};

}  // namespace hermitsep
