#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace slicecount {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Order-sensitive hash of a seed and a path of indices; used to derive
/// independent substreams (run j, node q, sample index r, phase).
inline std::uint64_t substreamSeed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
  for (std::uint64_t x : path) h = mix64(h ^ mix64(x + 0x632be59bd9b4e019ULL));
  return h;
}

/// SplitMix64. Small state, fast, and good enough for Bernoulli sampling.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }
  /// Uniform in (0, 1].
  double uniformOpen0() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

/// Number of failures before the next success of Bernoulli(t) trials,
/// 0 < t < 1. Saturates at UINT64_MAX.
inline std::uint64_t geometricSkip(SplitMix64& rng, double logOneMinusT) {
  double k = std::floor(std::log(rng.uniformOpen0()) / logOneMinusT);
  if (!(k < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(k);
}

}  // namespace slicecount
