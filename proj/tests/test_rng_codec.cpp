#include <cmath>

#include "core/codec.hpp"
#include "core/rng.hpp"
#include "doctest.h"

using namespace chanprot;

TEST_CASE("rng: streams are deterministic per seed") {
  Rng a(123), b(123), c(124);
  bool same = true, differ = false;
  for (int i = 0; i < 64; ++i) {
    const double x = a.gaussian();
    same = same && x == b.gaussian();
    differ = differ || x != c.gaussian();
  }
  CHECK(same);
  CHECK(differ);
}

TEST_CASE("rng: uniform01 stays in [0,1) and next_below in range") {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.next_below(17) < 17);
  }
}

TEST_CASE("rng: gaussian moments are sane") {
  Rng rng(2024);
  const std::size_t n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sum2 += g * g;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("mix_seed separates substreams") {
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
  CHECK(mix_seed(42, 7) == mix_seed(42, 7));
}

TEST_CASE("coding matrix: determinism per seed") {
  const auto a = generate_coding_matrix(64, 8, 99);
  const auto b = generate_coding_matrix(64, 8, 99);
  const auto c = generate_coding_matrix(64, 8, 100);
  bool same = true, differ = false;
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 8; ++j) {
      same = same && a.a(i, j) == b.a(i, j);
      differ = differ || a.a(i, j) != c.a(i, j);
    }
  CHECK(same);
  CHECK(differ);
}

TEST_CASE("coding matrix: entry statistics match N(0, 1/m)") {
  const std::size_t m = 256, n = 32;
  const auto cm = generate_coding_matrix(m, n, 7);

  // central-limit bound on the grand mean, computed here
  double mean = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) mean += cm.a(i, j);
  mean /= static_cast<double>(m * n);
  const double bound = 4.0 * std::sqrt(1.0 / (static_cast<double>(m) * m * n));
  CHECK(std::abs(mean) <= bound);

  // column-wise sample variance within the coarse sanity band
  for (std::size_t j = 0; j < n; ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < m; ++i) v += cm.a(i, j) * cm.a(i, j);
    v /= static_cast<double>(m);
    CHECK(v >= 0.5 / m);
    CHECK(v <= 1.5 / m);
  }
}

TEST_CASE("coding matrix: rejects n >= m") {
  CHECK_THROWS_AS(generate_coding_matrix(4, 8, 1), DimensionError);
  CHECK_THROWS_AS(generate_coding_matrix(8, 8, 1), DimensionError);
  CHECK_THROWS_AS(generate_coding_matrix(8, 0, 1), DimensionError);
}

TEST_CASE("encode: zero signal, basis extraction, matvec oracle") {
  const auto cm = generate_coding_matrix(32, 5, 3);

  CHECK(norm2(encode(cm, Vec(5, 0.0))) == 0.0);

  Vec e2(5, 0.0);
  e2[2] = 1.0;
  const Vec col = encode(cm, e2);
  for (std::size_t i = 0; i < 32; ++i) CHECK(col[i] == cm.a(i, 2));

  Rng rng(5);
  const Vec x = rng.gaussian_vec(5);
  const Vec y = encode(cm, x);
  for (std::size_t i = 0; i < 32; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 5; ++j) s += cm.a(i, j) * x[j];
    CHECK(std::abs(y[i] - s) <= 1e-12 * std::max(1.0, std::abs(s)));
  }
}

TEST_CASE("encode: linearity") {
  const auto cm = generate_coding_matrix(48, 6, 17);
  Rng rng(18);
  const Vec x1 = rng.gaussian_vec(6), x2 = rng.gaussian_vec(6);
  const double a = 1.7, b = -0.3;
  Vec combo(6);
  for (std::size_t i = 0; i < 6; ++i) combo[i] = a * x1[i] + b * x2[i];
  const Vec lhs = encode(cm, combo);
  const Vec y1 = encode(cm, x1), y2 = encode(cm, x2);
  for (std::size_t i = 0; i < 48; ++i)
    CHECK(lhs[i] == doctest::Approx(a * y1[i] + b * y2[i]).epsilon(1e-12));
}

TEST_CASE("encode: norm concentration for random unit signals") {
  const auto cm = generate_coding_matrix(256, 16, 21);
  Rng rng(22);
  for (int t = 0; t < 10; ++t) {
    Vec x = rng.gaussian_vec(16);
    const double nx = norm2(x);
    for (auto& v : x) v /= nx;
    const double ratio = norm2(encode(cm, x));
    CHECK(ratio >= 0.7);
    CHECK(ratio <= 1.3);
  }
}

TEST_CASE("encode: dimension mismatch rejected") {
  const auto cm = generate_coding_matrix(16, 4, 1);
  CHECK_THROWS_AS(encode(cm, Vec(5, 1.0)), DimensionError);
}
