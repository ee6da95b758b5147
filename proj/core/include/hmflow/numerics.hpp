#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace hmflow {

/// Sum with a fixed pairwise tree. The tree depends only on the length of
/// the input, so the result is reproducible regardless of how the values
/// were produced.
double pairwise_sum(std::span<const double> values);

/// Generator for trial `index` of a seeded experiment. Seeding goes through
/// std::seed_seq, whose algorithm is fixed by the standard.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t index = 0);

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
/// Unlike std::uniform_real_distribution this is identical on every
/// standard library.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

}  // namespace hmflow
