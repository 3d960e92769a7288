#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace cswitch {

using Rng = std::mt19937_64;

/// Counter-based seed derivation: mixes a master seed with a path of indices
/// (e.g. instance index, draw index) through splitmix64. Distinct paths give
/// statistically independent streams, and the result does not depend on the
/// order in which replications are scheduled.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(master, path));
}

/// Fair coin from the top bit of one 64-bit draw.
inline int fair_coin(Rng& rng) { return static_cast<int>(rng() >> 63); }

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace cswitch
