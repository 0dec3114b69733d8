#include <cmath>

#include "core/channel.hpp"
#include "core/codec.hpp"
#include "core/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chanprot;

TEST_CASE("generate_channel: counts, range, determinism") {
  const Channel h = generate_channel(16, 3, 5);
  CHECK(h.m == 16);
  CHECK(h.sparsity() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(h.support[i] < 16);
    CHECK(h.taps[i] != 0.0);
    if (i > 0) CHECK(h.support[i] > h.support[i - 1]);
  }
  const Channel h2 = generate_channel(16, 3, 5);
  CHECK(h.support == h2.support);
  CHECK(h.taps == h2.taps);
}

TEST_CASE("generate_channel: boundary sparsities") {
  CHECK(generate_channel(8, 1, 1).sparsity() == 1);
  const Channel dense_h = generate_channel(8, 8, 2);
  CHECK(dense_h.sparsity() == 8);
  for (std::size_t i = 0; i < 8; ++i) CHECK(dense_h.support[i] == i);
  CHECK_THROWS_AS(generate_channel(8, 9, 1), DimensionError);
  CHECK_THROWS_AS(generate_channel(8, 0, 1), DimensionError);
}

TEST_CASE("generate_channel: support is roughly uniform") {
  std::vector<std::size_t> hits(16, 0);
  for (std::uint64_t s = 0; s < 4000; ++s)
    for (std::size_t idx : generate_channel(16, 2, 1000 + s).support) ++hits[idx];
  for (std::size_t c : hits) {
    CHECK(c > 300);  // expectation 500 per bin
    CHECK(c < 700);
  }
}

TEST_CASE("dense/sparsify round trip") {
  const Channel h = make_channel(4, {1, 3}, {2.0, -1.0});
  CHECK(dense(h) == Vec{0.0, 2.0, 0.0, -1.0});
  const Channel h0 = make_channel(4, {0}, {1.0});
  CHECK(dense(h0) == Vec{1.0, 0.0, 0.0, 0.0});

  const Channel back = sparsify(dense(h));
  CHECK(back.support == h.support);
  CHECK(back.taps == h.taps);
  CHECK(back.m == h.m);
}

TEST_CASE("make_channel validates invariants") {
  CHECK_THROWS_AS(make_channel(4, {1, 1}, {1.0, 2.0}), DimensionError);
  CHECK_THROWS_AS(make_channel(4, {5}, {1.0}), DimensionError);
  CHECK_THROWS_AS(make_channel(4, {1}, {0.0}), DimensionError);
  CHECK_THROWS_AS(make_channel(4, {}, {}), DimensionError);
}

TEST_CASE("apply_channel: identity and pure delay") {
  Rng rng(31);
  const Vec codeword = rng.gaussian_vec(12);

  const Received id = apply_channel(codeword, make_channel(12, {0}, {1.0}), 0.0, 0);
  for (std::size_t i = 0; i < 12; ++i) CHECK(id.y[i] == doctest::Approx(codeword[i]));

  const Received delayed = apply_channel(codeword, make_channel(12, {5}, {1.0}), 0.0, 0);
  const Vec want = circshift(codeword, 5);
  for (std::size_t i = 0; i < 12; ++i) CHECK(delayed.y[i] == doctest::Approx(want[i]));
}

TEST_CASE("apply_channel: sparse path matches FFT and the double-sum oracle") {
  for (std::size_t m : {12u, 16u, 64u}) {
    Rng rng(0x400 + m);
    const Vec codeword = rng.gaussian_vec(m);
    const Channel h = generate_channel(m, 3, 0x500 + m);
    const Vec via_sparse = apply_channel(codeword, h, 0.0, 0).y;
    const Vec via_fft = circconv(codeword, dense(h));
    const Vec via_sum = oracle::direct_circconv(codeword, dense(h));
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(via_sparse[i] == doctest::Approx(via_fft[i]).epsilon(1e-10));
      CHECK(via_sparse[i] == doctest::Approx(via_sum[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("apply_channel: noise is seeded and optional") {
  Rng rng(77);
  const Vec codeword = rng.gaussian_vec(32);
  const Channel h = generate_channel(32, 2, 3);
  const Vec clean = apply_channel(codeword, h, 0.0, 42).y;
  const Vec noisy1 = apply_channel(codeword, h, 0.1, 42).y;
  const Vec noisy2 = apply_channel(codeword, h, 0.1, 42).y;
  const Vec noisy3 = apply_channel(codeword, h, 0.1, 43).y;
  CHECK(noisy1 == noisy2);
  CHECK(noisy1 != noisy3);
  CHECK(noisy1 != clean);
  CHECK_THROWS_AS(apply_channel(codeword, h, -0.5, 0), DimensionError);
  CHECK_THROWS_AS(apply_channel(Vec(31, 0.0), h, 0.0, 0), DimensionError);
}

TEST_CASE("forward model scale ambiguity") {
  const auto cm = generate_coding_matrix(64, 8, 11);
  Rng rng(12);
  for (double alpha : {2.0, -0.5, 10.0, 1e-3}) {
    const Vec x = rng.gaussian_vec(8);
    const Channel h = generate_channel(64, 3, rng.next_u64());

    Vec ax(8);
    for (std::size_t i = 0; i < 8; ++i) ax[i] = alpha * x[i];
    Channel h_over_alpha = h;
    for (auto& t : h_over_alpha.taps) t /= alpha;

    const Vec lhs = apply_channel(encode(cm, ax), h_over_alpha, 0.0, 0).y;
    const Vec rhs = apply_channel(encode(cm, x), h, 0.0, 0).y;
    double d2 = 0.0, r2 = 0.0;
    for (std::size_t i = 0; i < 64; ++i) {
      d2 += (lhs[i] - rhs[i]) * (lhs[i] - rhs[i]);
      r2 += rhs[i] * rhs[i];
    }
    CHECK(std::sqrt(d2) <= 1e-10 * std::sqrt(r2));
  }
}

TEST_CASE("noiseless output obeys the Young-type bound") {
  Rng rng(90);
  for (int t = 0; t < 5; ++t) {
    const Vec codeword = rng.gaussian_vec(24);
    const Channel h = generate_channel(24, 4, rng.next_u64());
    const Vec y = apply_channel(codeword, h, 0.0, 0).y;
    CHECK(norm2(y) <= norm1(dense(h)) * norm2(codeword) + 1e-12);
  }
}
