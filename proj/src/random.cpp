#include "engineir/random.hpp"

#include <stdexcept>

namespace engineir {

std::uint64_t uniform_below(Rng &rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: empty range");
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    std::uint64_t x = rng();
    if (x < limit) return x % n;
  }
}

std::int64_t uniform_between(Rng &rng, std::int64_t lo, std::int64_t hi) {
  auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(uniform_below(rng, span));
}

BigCount uniform_below(Rng &rng, const BigCount &n) {
  if (n <= 0) throw std::invalid_argument("uniform_below: empty range");
  if (n <= std::numeric_limits<std::uint64_t>::max())
    return BigCount(uniform_below(rng, static_cast<std::uint64_t>(n)));
  const auto bits = boost::multiprecision::msb(n) + 1;
  for (;;) {
    BigCount x = 0;
    std::size_t have = 0;
    while (have < bits) {
      x <<= 64;
      x |= rng();
      have += 64;
    }
    x >>= static_cast<unsigned>(have - bits);
    if (x < n) return x;
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace engineir
