#pragma once

#include <cstdint>
#include <random>

#include "engineir/egraph.hpp"

namespace engineir {

/// All randomness goes through std::mt19937_64, whose output sequence is
/// fixed by the C++ standard, and through the rejection samplers below
/// (the std distributions are implementation-defined). Same seed, same
/// stream, on every platform.
using Rng = std::mt19937_64;

/// Uniform in [0, n). n must be positive.
std::uint64_t uniform_below(Rng &rng, std::uint64_t n);
/// Uniform in [lo, hi].
std::int64_t uniform_between(Rng &rng, std::int64_t lo, std::int64_t hi);
/// Uniform in [0, n) for arbitrary-precision n > 0.
BigCount uniform_below(Rng &rng, const BigCount &n);

/// splitmix64 finalizer; derives independent sub-seeds from one seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace engineir
