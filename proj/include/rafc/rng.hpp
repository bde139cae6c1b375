#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace rafc {

/// Counter-based generator: draw k of stream s is a SplitMix64 finalizer
/// applied to (s, k). Streams never share state, so results do not depend on
/// the order in which independent streams are consumed.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t stream) : stream_(stream) {}

  /// Stream key derived from a master seed and a stream name (FNV-1a mixed).
  static std::uint64_t derive(std::uint64_t master_seed, std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return mix(master_seed ^ mix(h));
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() { return mix(stream_ + mix(counter_++)); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal by Box-Muller (cosine branch only).
  double normal() {
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

} // namespace rafc
