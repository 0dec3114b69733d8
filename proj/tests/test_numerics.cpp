#include <cmath>

#include "core/numerics.hpp"
#include "core/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chanprot;

namespace {

double rel_diff(const Vec& a, const Vec& b) {
  Vec d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double scale = std::max(norm2(b), 1e-300);
  return norm2(d) / scale;
}

double cvec_rel_diff(const CVec& a, const CVec& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace

TEST_CASE("fft: zero input gives zero spectrum") {
  const CVec spec = fft(Vec(16, 0.0));
  for (const auto& z : spec) CHECK(std::abs(z) == 0.0);
}

TEST_CASE("fft: impulse gives all-ones spectrum") {
  Vec v(8, 0.0);
  v[0] = 1.0;
  const CVec spec = fft(v);
  for (const auto& z : spec) {
    CHECK(z.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(z.imag()) < 1e-12);
  }
}

TEST_CASE("fft matches the direct DFT summation oracle") {
  // powers of two exercise radix-2, the rest exercise Bluestein
  for (std::size_t m : {2u, 3u, 7u, 10u, 12u, 16u, 31u, 64u}) {
    Rng rng(0x100 + m);
    const Vec v = rng.gaussian_vec(m);
    CHECK(cvec_rel_diff(fft(v), oracle::direct_dft(v)) < 1e-10);
  }
}

TEST_CASE("fft round trip and Parseval") {
  for (std::size_t m : {5u, 16u, 24u, 128u}) {
    Rng rng(0x200 + m);
    const Vec v = rng.gaussian_vec(m);
    const CVec spec = fft(v);
    const Vec back = ifft_real(spec);
    CHECK(rel_diff(back, v) < 1e-10);

    double spec_energy = 0.0;
    for (const auto& z : spec) spec_energy += std::norm(z);
    const double energy = dot(v, v);
    CHECK(spec_energy / static_cast<double>(m) ==
          doctest::Approx(energy).epsilon(1e-10));
  }
}

TEST_CASE("fft rejects empty input") {
  CHECK_THROWS_AS(fft(Vec{}), DimensionError);
}

TEST_CASE("circshift basics") {
  const Vec v{1, 2, 3, 4};
  CHECK(circshift(v, 1) == Vec{4, 1, 2, 3});
  CHECK(circshift(v, 0) == v);
  CHECK(circshift(v, 4) == v);
  CHECK(circshift(v, -1) == Vec{2, 3, 4, 1});
  CHECK(circshift(circshift(v, 3), -3) == v);
}

TEST_CASE("circshift composition adds shift counts mod m") {
  Rng rng(42);
  const Vec v = rng.gaussian_vec(12);
  for (long long s : {1ll, 5ll, -3ll, 25ll})
    for (long long t : {2ll, -7ll, 11ll})
      CHECK(circshift(circshift(v, s), t) == circshift(v, s + t));
}

TEST_CASE("circconv: identity and delay atoms") {
  Rng rng(7);
  const Vec v = rng.gaussian_vec(9);
  Vec delta0(9, 0.0), delta1(9, 0.0);
  delta0[0] = 1.0;
  delta1[1] = 1.0;
  CHECK(rel_diff(circconv(v, delta0), v) < 1e-12);
  CHECK(rel_diff(circconv(v, delta1), circshift(v, 1)) < 1e-12);
}

TEST_CASE("circconv matches the double-sum oracle and commutes") {
  for (std::size_t m : {4u, 12u, 33u, 64u}) {
    Rng rng(0x300 + m);
    const Vec a = rng.gaussian_vec(m);
    const Vec b = rng.gaussian_vec(m);
    const Vec fast = circconv(a, b);
    CHECK(rel_diff(fast, oracle::direct_circconv(a, b)) < 1e-10);
    CHECK(rel_diff(fast, circconv(b, a)) < 1e-12);
  }
}

TEST_CASE("circconv rejects mismatched lengths") {
  CHECK_THROWS_AS(circconv(Vec(4, 1.0), Vec(5, 1.0)), DimensionError);
}

TEST_CASE("qr: identity factors as identity") {
  const auto f = qr(Matrix::identity(4));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(f.q(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
      CHECK(f.r(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
    }
}

TEST_CASE("qr: reconstruction, orthonormality, nonnegative diagonal") {
  Rng rng(101);
  Matrix m(20, 5);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 5; ++j) m(i, j) = rng.gaussian();
  const auto f = qr(m);

  for (std::size_t j = 0; j < 5; ++j) CHECK(f.r(j, j) >= 0.0);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      double rec = 0.0;
      for (std::size_t t = 0; t < 5; ++t) rec += f.q(i, t) * f.r(t, j);
      CHECK(std::abs(rec - m(i, j)) < 1e-10);
    }
  for (std::size_t a = 0; a < 5; ++a)
    for (std::size_t b = 0; b < 5; ++b) {
      double g = 0.0;
      for (std::size_t i = 0; i < 20; ++i) g += f.q(i, a) * f.q(i, b);
      CHECK(std::abs(g - (a == b ? 1.0 : 0.0)) < 1e-10);
    }
}

TEST_CASE("qr: identical columns raise rank deficiency") {
  Rng rng(11);
  Matrix m(6, 3);
  for (std::size_t i = 0; i < 6; ++i) {
    m(i, 0) = rng.gaussian();
    m(i, 1) = m(i, 0);
    m(i, 2) = rng.gaussian();
  }
  CHECK_THROWS_AS(qr(m), RankDeficiencyError);
}

TEST_CASE("lstsq: identity system returns rhs") {
  const Vec y{3.0, -1.0, 2.0};
  CHECK(rel_diff(lstsq(Matrix::identity(3), y), y) < 1e-14);
}

TEST_CASE("lstsq: consistent system solved exactly") {
  Rng rng(55);
  Matrix m(10, 4);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 4; ++j) m(i, j) = rng.gaussian();
  const Vec x_true = rng.gaussian_vec(4);
  const Vec y = m.apply(x_true);
  const Vec x = lstsq(m, y);
  CHECK(rel_diff(x, x_true) < 1e-10);
  Vec r = m.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
  CHECK(norm2(r) < 1e-10 * norm2(y));
}

TEST_CASE("lstsq matches the normal-equations oracle") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    Rng rng(seed);
    Matrix m(15, 6);
    for (std::size_t i = 0; i < 15; ++i)
      for (std::size_t j = 0; j < 6; ++j) m(i, j) = rng.gaussian();
    const Vec y = rng.gaussian_vec(15);
    CHECK(rel_diff(lstsq(m, y), oracle::normal_equations_lstsq(m, y)) < 1e-8);
  }
}

TEST_CASE("lstsq residual is orthogonal to the column space") {
  Rng rng(77);
  Matrix m(25, 7);
  for (std::size_t i = 0; i < 25; ++i)
    for (std::size_t j = 0; j < 7; ++j) m(i, j) = rng.gaussian();
  const Vec y = rng.gaussian_vec(25);
  const Vec x = lstsq(m, y);
  Vec r = m.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
  const Vec mtr = m.apply_transposed(r);
  const Vec mty = m.apply_transposed(y);
  CHECK(norm_inf(mtr) <= 1e-8 * norm_inf(mty) + 1e-12);
}

TEST_CASE("solve_spd rejects singular systems") {
  Matrix g(2, 2);
  g(0, 0) = 1.0;
  g(0, 1) = 1.0;
  g(1, 0) = 1.0;
  g(1, 1) = 1.0;
  CHECK_THROWS_AS(solve_spd(g, Vec{1.0, 1.0}), DegeneratePathError);
}
