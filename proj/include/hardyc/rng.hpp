#pragma once

#include <cstdint>

namespace hardyc {

/// Counter-based generator: draw i of stream k is a pure function of
/// (seed, k, i), so samples never depend on evaluation order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t i) const {
    return mix(mix(seed_ ^ 0x6a09e667f3bcc909ULL) + mix(stream_ + 0xbb67ae8584caa73bULL) + i);
  }
  /// Uniform in [0, 1).
  double uniform(std::uint64_t i) const { return static_cast<double>(bits(i) >> 11) * 0x1.0p-53; }
  double uniform(std::uint64_t i, double lo, double hi) const { return lo + (hi - lo) * uniform(i); }

  /// Sequential use.
  double next() { return uniform(counter_++); }
  double next(double lo, double hi) { return uniform(counter_++, lo, hi); }

  CounterRng substream(std::uint64_t k) const { return CounterRng(seed_, stream_ * 0x9e3779b97f4a7c15ULL + k + 1); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace hardyc
