#include "channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rng.hpp"

namespace chanprot {

Channel generate_channel(std::size_t m, std::size_t k, std::uint64_t seed) {
  if (k < 1 || k > m) throw DimensionError("generate_channel: need 1 <= k <= m");
  Rng rng(seed);

  // partial Fisher-Yates, then sort for a strictly increasing support
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(m - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<std::size_t> support(idx.begin(), idx.begin() + k);
  std::sort(support.begin(), support.end());

  Vec taps(k);
  for (auto& t : taps) {
    do {
      t = rng.gaussian();
    } while (t == 0.0);  // taps must be nonzero; rejection is measure-zero
  }
  return Channel{m, std::move(support), std::move(taps)};
}

Channel make_channel(std::size_t m, std::vector<std::size_t> support, Vec taps) {
  if (support.empty() || support.size() != taps.size())
    throw DimensionError("make_channel: support/taps size mismatch or empty");
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] >= m) throw DimensionError("make_channel: support index out of range");
    if (i > 0 && support[i] <= support[i - 1])
      throw DimensionError("make_channel: support not strictly increasing");
    if (taps[i] == 0.0 || !std::isfinite(taps[i]))
      throw DimensionError("make_channel: taps must be nonzero and finite");
  }
  return Channel{m, std::move(support), std::move(taps)};
}

Vec dense(const Channel& h) {
  Vec v(h.m, 0.0);
  for (std::size_t i = 0; i < h.support.size(); ++i) v[h.support[i]] = h.taps[i];
  return v;
}

Channel sparsify(const Vec& v) {
  Channel h;
  h.m = v.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) {
      h.support.push_back(i);
      h.taps.push_back(v[i]);
    }
  }
  return h;
}

Received apply_channel(const Vec& codeword, const Channel& h, double noise_sigma,
                       std::uint64_t noise_seed) {
  if (codeword.size() != h.m) throw DimensionError("apply_channel: codeword length != m");
  if (noise_sigma < 0.0) throw DimensionError("apply_channel: noise_sigma < 0");
  ensure_finite(codeword, "apply_channel: codeword");

  const std::size_t m = h.m;
  Vec y(m, 0.0);
  for (std::size_t t = 0; t < h.support.size(); ++t) {
    const std::size_t d = h.support[t];
    const double g = h.taps[t];
    for (std::size_t j = 0; j < m; ++j) y[(j + d) % m] += g * codeword[j];
  }
  if (noise_sigma > 0.0) {
    Rng rng(noise_seed);
    for (auto& v : y) v += noise_sigma * rng.gaussian();
  }
  return Received{std::move(y), noise_sigma};
}

}  // namespace chanprot
