#include "qsched/rng.hpp"

#include "qsched/errors.hpp"

namespace qsched {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) {
    throw ValidationError("Rng::below requires a positive bound");
  }
  // reject the incomplete top bucket so every residue is equally likely
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  std::uint64_t x = next();
  while (x >= limit) {
    x = next();
  }
  return x % n;
}

int Rng::uniformInt(int lo, int hi) {
  if (hi < lo) {
    throw ValidationError("Rng::uniformInt: empty range");
  }
  const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
  return lo + static_cast<int>(below(span));
}

std::uint64_t deriveSeed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

} // namespace qsched
