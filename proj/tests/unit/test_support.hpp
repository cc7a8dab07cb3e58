#pragma once

#include <cstdint>

#include "plad/core_model.hpp"
#include "plad/rng.hpp"

namespace plad::testing {

inline Matrix gaussian_matrix(Index n, Index p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) m(i, j) = rng.normal();
  }
  return m;
}

inline DesignMatrix gaussian_design(Index n, Index p, std::uint64_t seed) {
  return normalize_columns(gaussian_matrix(n, p, seed));
}

inline Vector gaussian_vector(Index n, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

}  // namespace plad::testing
