#pragma once

#include <cstdint>

#include "numerics.hpp"

namespace chanprot {

// Random coding matrix A (m x n), entries i.i.d. N(0, 1/m) at generation.
struct CodingMatrix {
  std::size_t m = 0;
  std::size_t n = 0;
  Matrix a;
  std::uint64_t seed = 0;
};

// Deterministic per seed; requires 1 <= n < m.
CodingMatrix generate_coding_matrix(std::size_t m, std::size_t n, std::uint64_t seed);

// Codeword A*x; x must have length n.
Vec encode(const CodingMatrix& a, const Vec& x);

}  // namespace chanprot
