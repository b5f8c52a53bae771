#pragma once

#include "ttcov/tensor.hpp"

#include <cstdint>
#include <random>

namespace ttcov {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent stream seeds.
[[nodiscard]] constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for sub-stream `index` of stream `stream` under `master`.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                                  std::uint64_t index) noexcept {
  return mix_seed(mix_seed(mix_seed(master) ^ stream) ^ index);
}

/// Matrix with i.i.d. N(0, 1) entries, filled column by column.
[[nodiscard]] inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

}  // namespace ttcov
