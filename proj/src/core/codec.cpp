#include "codec.hpp"

#include <cmath>

#include "rng.hpp"

namespace chanprot {

CodingMatrix generate_coding_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (n < 1 || n >= m)
    throw DimensionError("generate_coding_matrix: need 1 <= n < m (the code must expand)");
  CodingMatrix cm;
  cm.m = m;
  cm.n = n;
  cm.seed = seed;
  cm.a = Matrix(m, n);
  Rng rng(seed);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) cm.a(i, j) = stddev * rng.gaussian();
  return cm;
}

Vec encode(const CodingMatrix& a, const Vec& x) {
  if (x.size() != a.n) throw DimensionError("encode: signal length != n");
  ensure_finite(x, "encode: signal");
  return a.a.apply(x);
}

}  // namespace chanprot
