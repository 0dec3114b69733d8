#pragma once

#include <cstdint>
#include <vector>

namespace chanprot {

// Deterministic stream generator: SplitMix64 state advance with the standard
// finalizer, Gaussian variates by the Marsaglia polar method. Reproducibility
// is per-seed and independent of the standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // uniform in [0, 1), 53-bit resolution
  double uniform01();

  // uniform integer in [0, bound), rejection-sampled (no modulo bias)
  std::uint64_t next_below(std::uint64_t bound);

  // standard normal N(0, 1)
  double gaussian();

  std::vector<double> gaussian_vec(std::size_t len, double stddev = 1.0);

private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent substream seed from (seed, salt): the salt is folded
// in with a golden-ratio multiple, then passed through the SplitMix64
// finalizer. Used everywhere a parent seed spawns child streams, including
// per-trial seeds mix(mix(mix(base, n), k), trial).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace chanprot
