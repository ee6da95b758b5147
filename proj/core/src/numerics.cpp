#include "hmflow/numerics.hpp"

#include <array>

namespace hmflow {

namespace {

constexpr std::size_t kLeafSize = 16;

double sum_tree(const double* data, std::size_t n) {
  if (n <= kLeafSize) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return sum_tree(data, half) + sum_tree(data + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return sum_tree(values.data(), values.size());
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t index) {
  std::array<std::uint32_t, 4> words{
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(index),
      static_cast<std::uint32_t>(index >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace hmflow
