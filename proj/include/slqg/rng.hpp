#pragma once

#include <cstdint>

namespace slqg {

// Counter-based random numbers: every variate is a pure function of
// (seed, stream, counter), so path simulations can run on any number of
// workers, in any order, and still produce bit-identical output.

// 64-bit finalizer (MurmurHash3); full-avalanche bijection.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t counter) {
  constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h ^ (stream + kGolden));
  h = mix64(h ^ (counter + kGolden));
  return h;
}

// Top 53 bits, offset to the open interval (0, 1).
inline double to_unit_interval(std::uint64_t h) {
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse of the standard normal CDF (Wichura's PPND16 rational
// approximations, accurate to ~1e-16 for p in (0,1)).
double normal_quantile(double p);

inline double uniform_draw(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t counter) {
  return to_unit_interval(counter_hash(seed, stream, counter));
}

inline double gaussian_draw(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t counter) {
  return normal_quantile(uniform_draw(seed, stream, counter));
}

// Convenience sequential view of one (seed, stream) lane; used for trial-wise
// deterministic draws outside the path simulator.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  double next_uniform() { return uniform_draw(seed_, stream_, counter_++); }
  // Uniform on [lo, hi].
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_uniform();
  }
  double next_gaussian() { return gaussian_draw(seed_, stream_, counter_++); }
  // Integer in [0, bound) by scaling; bound tiny relative to 2^53.
  std::uint64_t next_index(std::uint64_t bound) {
    return static_cast<std::uint64_t>(next_uniform() * static_cast<double>(bound));
  }

 private:
  std::uint64_t seed_, stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace slqg
