#include "am.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chanprot {

namespace {

Vec subtract(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

// H = dense(h) (x) A, column by column through the channel spectrum.
Matrix convolved_dictionary(const CodingMatrix& a, const Channel& h) {
  const std::size_t m = a.m, n = a.n;
  const CVec hspec = fft(dense(h));
  Matrix out(m, n);
  for (std::size_t j = 0; j < n; ++j) {
    CVec col = fft(a.a.col(j));
    for (std::size_t i = 0; i < m; ++i) col[i] *= hspec[i];
    Vec conv = ifft_real(col);
    for (std::size_t i = 0; i < m; ++i) out(i, j) = conv[i];
  }
  return out;
}

}  // namespace

AmConfig AmConfig::defaults(std::size_t m) {
  AmConfig cfg;
  cfg.k_max = std::max<std::size_t>(1, m / 4);
  cfg.max_iters = cfg.r * cfg.k_max;
  return cfg;
}

InitEstimate strongest_path_init(const CodingMatrix& a, const Vec& y) {
  if (y.size() != a.m) throw DimensionError("strongest_path_init: y length != m");
  ensure_finite(y, "strongest_path_init: y");
  const std::size_t m = a.m, n = a.n;
  const QrFactors f = qr(a.a);

  // (Q^T circshift(y, -d))_i for all d at once: cross-correlate Q's columns
  // with y. Shifting y backward matches shifting the columns of A forward.
  std::vector<Vec> qcorr(n);
  for (std::size_t i = 0; i < n; ++i) qcorr[i] = circcorr(f.q.col(i), y);

  const double y2 = dot(y, y);
  std::size_t best = 0;
  double best_gain = -1.0;
  for (std::size_t d = 0; d < m; ++d) {
    double gain = 0.0;
    for (std::size_t i = 0; i < n; ++i) gain += qcorr[i][d] * qcorr[i][d];
    if (gain > best_gain + 1e-12 * std::max(1.0, best_gain)) {
      best_gain = gain;
      best = d;
    }
  }

  InitEstimate est;
  est.delay = best;
  est.residual = std::sqrt(std::max(0.0, y2 - best_gain));

  Vec qt(n);
  for (std::size_t i = 0; i < n; ++i) qt[i] = qcorr[i][best];
  Vec x0(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = qt[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.r(i, j) * x0[j];
    x0[i] = s / f.r(i, i);
  }

  const double s = norm2(x0);
  if (s > 0.0) {
    for (auto& v : x0) v /= s;
    est.h0 = Channel{m, {best}, {s}};
  }
  est.x0 = std::move(x0);
  return est;
}

InitEstimate init_at_delay(const CodingMatrix& a, const Vec& y, std::size_t delay) {
  if (y.size() != a.m) throw DimensionError("init_at_delay: y length != m");
  if (delay >= a.m) throw DimensionError("init_at_delay: delay out of range");
  const Vec shifted = circshift(y, -static_cast<long long>(delay));
  Vec x0 = lstsq(a.a, shifted);

  InitEstimate est;
  est.delay = delay;
  est.residual = norm2(subtract(a.a.apply(x0), shifted));
  const double s = norm2(x0);
  if (s > 0.0) {
    for (auto& v : x0) v /= s;
    est.h0 = Channel{a.m, {delay}, {s}};
  }
  est.x0 = std::move(x0);
  return est;
}

Vec signal_update(const CodingMatrix& a, const Channel& h, const Vec& y) {
  if (y.size() != a.m) throw DimensionError("signal_update: y length != m");
  if (h.support.empty()) throw DimensionError("signal_update: empty channel");
  return lstsq(convolved_dictionary(a, h), y);
}

ChannelUpdate channel_update(const CodingMatrix& a, const Vec& x, const Vec& y,
                             std::size_t k_target, double tau_floor) {
  if (norm2(x) == 0.0) throw DimensionError("channel_update: zero signal estimate");
  CirculantOperator c(encode(a, x));
  HomotopyResult path = solve_to_cardinality(c, y, k_target, tau_floor);

  ChannelUpdate upd;
  upd.tau = path.tau_final;
  upd.h.m = a.m;
  upd.h.support = path.support;
  upd.h.taps = path.values;
  upd.path = std::move(path);
  return upd;
}

RecoveryResult recover(const CodingMatrix& a, const Vec& y, const AmConfig& cfg_in) {
  RecoveryResult res;
  if (y.size() != a.m) throw DimensionError("recover: y length != m");
  ensure_finite(y, "recover: y");

  AmConfig cfg = cfg_in;
  if (cfg.k_max == 0) cfg.k_max = std::max<std::size_t>(1, a.m / 4);
  if (cfg.max_iters == 0) cfg.max_iters = cfg.r * cfg.k_max;

  const double ynorm = norm2(y);
  res.x_hat.assign(a.n, 0.0);
  if (ynorm == 0.0) {
    res.status = AmStatus::degenerate;
    return res;
  }

  InitEstimate init;
  try {
    init = cfg.init_delay >= 0
               ? init_at_delay(a, y, static_cast<std::size_t>(cfg.init_delay))
               : strongest_path_init(a, y);
  } catch (const RankDeficiencyError&) {
    res.status = AmStatus::degenerate;
    return res;
  }
  if (norm2(init.x0) == 0.0) {
    res.status = AmStatus::degenerate;
    return res;
  }

  Vec x = init.x0;
  Channel h = init.h0;
  res.status = AmStatus::iteration_cap;

  for (std::size_t j = 1; j <= cfg.max_iters; ++j) {
    const std::size_t kj = (j + cfg.r - 1) / cfg.r;  // ceil(j / r)
    if (kj > cfg.k_max) {
      res.status = AmStatus::cardinality_cap;
      break;
    }

    AmIterationRecord rec;
    rec.iter = j;
    rec.k = kj;

    try {
      ChannelUpdate upd = channel_update(a, x, y, kj);
      rec.tau = upd.tau;
      h = std::move(upd.h);
      if (h.support.empty()) throw DegeneratePathError("recover: empty channel estimate");
      if (cfg.debias) {
        CirculantOperator c(encode(a, x));
        Vec refit = refit_on_support(c, y, h.support);
        // exact zeros after the refit would break the channel invariant
        Channel hd;
        hd.m = h.m;
        for (std::size_t t = 0; t < h.support.size(); ++t) {
          if (refit[t] != 0.0) {
            hd.support.push_back(h.support[t]);
            hd.taps.push_back(refit[t]);
          }
        }
        if (hd.support.empty()) throw DegeneratePathError("recover: refit vanished");
        h = std::move(hd);
      }

      const Matrix dict = convolved_dictionary(a, h);
      rec.ls_before = norm2(subtract(dict.apply(x), y));
      Vec x_raw = lstsq(dict, y);
      rec.ls_after = norm2(subtract(dict.apply(x_raw), y));

      const double s = norm2(x_raw);
      if (s == 0.0) throw DegeneratePathError("recover: zero signal update");
      for (auto& v : x_raw) v /= s;
      x = std::move(x_raw);
      for (auto& t : h.taps) t *= s;  // normalization: h carries the scale
    } catch (const DegeneratePathError&) {
      res.status = AmStatus::degenerate;
      break;
    } catch (const RankDeficiencyError&) {
      res.status = AmStatus::degenerate;
      break;
    }

    rec.x_norm = norm2(x);
    rec.residual = norm2(subtract(apply_channel(encode(a, x), h, 0.0, 0).y, y));
    rec.support = h.support;
    res.trace.push_back(std::move(rec));
    res.iterations = j;
    res.residual_rel = res.trace.back().residual / ynorm;

    if (res.residual_rel <= cfg.residual_tol) {
      res.status = AmStatus::converged;
      break;
    }
  }

  res.x_hat = std::move(x);
  res.h_hat = std::move(h);
  return res;
}

Alignment align_scale(const Vec& x_hat, const Vec& x_true) {
  if (x_hat.size() != x_true.size()) throw DimensionError("align_scale: length mismatch");
  const double h2 = dot(x_hat, x_hat);
  if (h2 == 0.0) throw DimensionError("align_scale: zero estimate");
  Alignment al;
  al.alpha = dot(x_hat, x_true) / h2;
  Vec diff(x_hat.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = al.alpha * x_hat[i] - x_true[i];
  al.rel_err = norm2(diff) / norm2(x_true);
  return al;
}

double channel_rel_err(const Channel& h_hat, const Channel& h_true, double alpha) {
  if (alpha == 0.0) return std::numeric_limits<double>::infinity();
  Vec dh = dense(h_hat), dt = dense(h_true);
  if (dh.size() != dt.size()) throw DimensionError("channel_rel_err: length mismatch");
  Vec diff(dh.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = dh[i] / alpha - dt[i];
  return norm2(diff) / norm2(dt);
}

const char* to_string(AmStatus s) {
  switch (s) {
    case AmStatus::converged: return "converged";
    case AmStatus::iteration_cap: return "iteration-cap";
    case AmStatus::cardinality_cap: return "cardinality-cap";
    case AmStatus::degenerate: return "degenerate";
  }
  return "unknown";
}

}  // namespace chanprot
