#pragma once

#include <limits>

#include "channel.hpp"
#include "codec.hpp"
#include "homotopy.hpp"

namespace chanprot {

enum class AmStatus { converged, iteration_cap, cardinality_cap, degenerate };

struct AmConfig {
  std::size_t r = 3;           // iterations per cardinality level, k_j = ceil(j/r)
  std::size_t k_max = 0;       // 0 -> floor(m/4), at least 1
  std::size_t max_iters = 0;   // 0 -> r * k_max
  double residual_tol = 1e-6;  // relative forward-model residual for convergence
  long long init_delay = -1;   // >= 0: known strongest-path delay; -1: search for it
  bool debias = true;          // LS refit of taps on the recovered support each iteration

  static AmConfig defaults(std::size_t m);
};

struct AmIterationRecord {
  std::size_t iter = 0;
  std::size_t k = 0;
  double tau = 0.0;
  double residual = 0.0;   // || h_j (x) A x_j - y ||_2 after the scale transfer
  double ls_before = 0.0;  // || H_j x_{j-1} - y ||_2
  double ls_after = 0.0;   // || H_j x_j - y ||_2, x_j pre-normalization
  double x_norm = 0.0;     // || x_j ||_2 after normalization
  std::vector<std::size_t> support;
};

using AmTrace = std::vector<AmIterationRecord>;

struct RecoveryResult {
  Vec x_hat;        // unit norm except on degenerate early exit
  Channel h_hat;    // empty support on degenerate early exit
  AmStatus status = AmStatus::degenerate;
  double residual_rel = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  AmTrace trace;
};

struct InitEstimate {
  std::size_t delay = 0;
  Vec x0;        // unit norm; all-zero when y = 0
  Channel h0;    // single tap at `delay` carrying the fitted scale
  double residual = 0.0;
};

struct ChannelUpdate {
  Channel h;         // homotopy solution, l1-biased (no refit)
  double tau = 0.0;  // regularization level at the returned breakpoint
  HomotopyResult path;
};

// Scores every delay d by min_x || S^d A x - y ||^2 and returns the best.
// One QR of A serves all delays: the residual at delay d equals the
// projection residual of circshift(y, -d) onto the column space of A, and
// the required inner products come from FFT cross-correlations. Ties break
// to the smallest delay.
InitEstimate strongest_path_init(const CodingMatrix& a, const Vec& y);

// Same fit for one known delay.
InitEstimate init_at_delay(const CodingMatrix& a, const Vec& y, std::size_t delay);

// argmin_x || H x - y ||^2 with H = [dense(h) (x) A e_j]_j, via QR.
// Throws RankDeficiencyError when H is rank-deficient to working precision.
Vec signal_update(const CodingMatrix& a, const Channel& h, const Vec& y);

// Builds the circulant operator from A x and runs the homotopy to k_target.
ChannelUpdate channel_update(const CodingMatrix& a, const Vec& x, const Vec& y,
                             std::size_t k_target, double tau_floor = -1.0);

// Full alternating-minimization recovery. All failure modes come back as
// statuses; nothing throws for data-dependent reasons.
RecoveryResult recover(const CodingMatrix& a, const Vec& y, const AmConfig& cfg);

struct Alignment {
  double alpha = 0.0;    // <x_hat, x_true> / ||x_hat||^2
  double rel_err = 0.0;  // || alpha x_hat - x_true || / || x_true ||
};

// Resolves the bilinear scale/sign ambiguity before judging success.
Alignment align_scale(const Vec& x_hat, const Vec& x_true);

// Channel-side counterpart: compares h_hat / alpha against h_true.
// Returns +inf when alpha == 0.
double channel_rel_err(const Channel& h_hat, const Channel& h_true, double alpha);

const char* to_string(AmStatus s);

}  // namespace chanprot
