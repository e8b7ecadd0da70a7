#ifndef SLFS_RNG_HPP
#define SLFS_RNG_HPP

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace slfs {

// std::shuffle and the std distributions are implementation-defined, so all
// randomness that ends up in outputs goes through these helpers instead.
// mt19937_64 output itself is pinned by the standard, which keeps runs
// reproducible across toolchains given the same seed.

/// Unbiased draw from [0, bound) via rejection sampling. bound must be > 0.
inline std::uint64_t bounded_u64(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % bound;
}

/// Fisher-Yates shuffle with a platform-independent draw sequence.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded_u64(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace slfs

#endif  // SLFS_RNG_HPP
