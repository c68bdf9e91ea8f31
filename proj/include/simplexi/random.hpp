#pragma once

#include <cstdint>
#include <random>

#include "simplexi/types.hpp"

namespace simplexi {

using Rng = std::mt19937_64;

// Derives independent generator streams from one user seed so that each
// consumer (sketch, start vectors, directions, ...) is reproducible alone.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(mix_seed(seed, stream));
}

inline DenseMatrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  return out;
}

inline Vector gaussian_vector(Index len, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector out(len);
  for (Index i = 0; i < len; ++i) out(i) = normal(rng);
  return out;
}

}  // namespace simplexi
