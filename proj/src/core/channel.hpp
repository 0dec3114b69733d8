#pragma once

#include <cstdint>

#include "numerics.hpp"

namespace chanprot {

// k-sparse impulse response: strictly increasing support, nonzero taps.
struct Channel {
  std::size_t m = 0;
  std::vector<std::size_t> support;
  Vec taps;

  std::size_t sparsity() const { return support.size(); }
};

struct Received {
  Vec y;
  double noise_sigma = 0.0;
};

// Support drawn uniformly without replacement, taps i.i.d. N(0,1).
Channel generate_channel(std::size_t m, std::size_t k, std::uint64_t seed);

// Validates invariants and returns the channel; used by deserializers.
Channel make_channel(std::size_t m, std::vector<std::size_t> support, Vec taps);

// Length-m vector with taps at support, zeros elsewhere.
Vec dense(const Channel& h);

// Inverse of dense(): collects the nonzero entries of v.
Channel sparsify(const Vec& v);

// y = codeword (x) dense(h) + noise, noise ~ N(0, sigma^2 I) per entry.
// Sparse-aware evaluation (sum of scaled shifts); matches the FFT path.
Received apply_channel(const Vec& codeword, const Channel& h, double noise_sigma,
                       std::uint64_t noise_seed);

}  // namespace chanprot
