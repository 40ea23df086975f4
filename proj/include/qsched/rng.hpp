#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace qsched {

/**
 * Seeded random source with platform-independent draws.
 *
 * The engine is std::mt19937_64; the mapping from raw 64-bit words to
 * integers and reals is done here rather than through the std
 * distributions, whose output differs between standard library vendors.
 * Reports and golden fixtures depend on this being stable.
 */
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Uniform integer in the closed range [lo, hi].
  int uniformInt(int lo, int hi);

  /// Uniform real in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  template <class T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[below(i)]);
    }
  }

private:
  std::mt19937_64 engine_;
};

/// Splitmix64 finalizer; derives independent stream seeds from one base seed.
std::uint64_t deriveSeed(std::uint64_t base, std::uint64_t stream);

} // namespace qsched
