#include "homotopy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace chanprot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

CirculantOperator::CirculantOperator(Vec generator) : g_(std::move(generator)) {
  if (g_.empty()) throw DimensionError("CirculantOperator: empty generator");
  ensure_finite(g_, "CirculantOperator: generator");
  spec_ = fft(g_);
  CVec p(spec_.size());
  for (std::size_t i = 0; i < spec_.size(); ++i) p[i] = std::conj(spec_[i]) * spec_[i];
  acorr_ = ifft_real(p);
}

Vec CirculantOperator::column(std::size_t j) const { return circshift(g_, static_cast<long long>(j)); }

Vec CirculantOperator::apply_sparse(const std::vector<std::size_t>& support,
                                    const Vec& values) const {
  const std::size_t m = g_.size();
  Vec out(m, 0.0);
  for (std::size_t t = 0; t < support.size(); ++t) {
    const std::size_t d = support[t];
    const double v = values[t];
    for (std::size_t j = 0; j < m; ++j) out[(j + d) % m] += v * g_[j];
  }
  return out;
}

Vec CirculantOperator::apply_dense(const Vec& h) const {
  if (h.size() != g_.size()) throw DimensionError("CirculantOperator::apply_dense: length mismatch");
  CVec fh = fft(h);
  for (std::size_t i = 0; i < fh.size(); ++i) fh[i] *= spec_[i];
  return ifft_real(fh);
}

Vec CirculantOperator::correlate(const Vec& r) const {
  if (r.size() != g_.size()) throw DimensionError("CirculantOperator::correlate: length mismatch");
  CVec fr = fft(r);
  for (std::size_t i = 0; i < fr.size(); ++i) fr[i] = std::conj(spec_[i]) * fr[i];
  return ifft_real(fr);
}

Vec HomotopyResult::dense_solution(std::size_t m) const {
  Vec v(m, 0.0);
  for (std::size_t i = 0; i < support.size(); ++i) v[support[i]] = values[i];
  return v;
}

namespace {

// Path state: active column list with current coefficients and sign pattern.
struct PathState {
  std::vector<std::size_t> active;
  Vec coef;   // aligned with active
  Vec sign;   // aligned with active; sign the KKT equation is pinned to
  double tau = 0.0;
};

Vec gram_direction(const CirculantOperator& c, const PathState& s) {
  const std::size_t k = s.active.size();
  const std::size_t m = c.size();
  Matrix gram(k, k);
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t q = 0; q < k; ++q)
      gram(p, q) = c.autocorr((s.active[p] + m - s.active[q]) % m);
  return solve_spd(gram, s.sign);
}

struct SortedResult {
  std::vector<std::size_t> support;
  Vec values;
};

SortedResult collect_nonzeros(const PathState& s) {
  std::vector<std::size_t> order(s.active.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return s.active[a] < s.active[b]; });
  SortedResult out;
  for (std::size_t i : order) {
    if (s.coef[i] != 0.0) {
      out.support.push_back(s.active[i]);
      out.values.push_back(s.coef[i]);
    }
  }
  return out;
}

}  // namespace

HomotopyResult solve_to_cardinality(const CirculantOperator& c, const Vec& y,
                                    std::size_t k_target, double tau_floor,
                                    PathTrace* trace) {
  const std::size_t m = c.size();
  if (y.size() != m) throw DimensionError("solve_to_cardinality: y length != m");
  if (k_target < 1 || k_target > m)
    throw DimensionError("solve_to_cardinality: need 1 <= k_target <= m");
  ensure_finite(y, "solve_to_cardinality: y");

  HomotopyResult res;

  Vec corr = c.correlate(y);
  const double tau0 = norm_inf(corr);
  if (tau_floor < 0.0) tau_floor = 1e-12 * tau0;

  if (tau0 <= tau_floor || tau0 == 0.0) {
    // all-zero solution boundary already at/below the floor
    res.tau_final = std::max(tau0, tau_floor);
    res.status = HomotopyStatus::reached_tau;
    return res;
  }

  PathState st;
  st.tau = tau0;

  // first breakpoint: the max-correlation column enters at tau0
  std::size_t first = 0;
  for (std::size_t i = 1; i < m; ++i)
    if (std::abs(corr[i]) > std::abs(corr[first])) first = i;
  st.active.push_back(first);
  st.coef.push_back(0.0);
  st.sign.push_back(sign_of(corr[first]));
  std::size_t breakpoints = 1;
  if (trace) trace->push_back({breakpoints, st.tau, 'A', first, 0});

  std::vector<char> is_active(m, 0);
  is_active[first] = 1;
  long long last_removed = -1;
  const std::size_t max_breakpoints = 40 * m + 100;
  const double delta_eps = 1e-13 * (1.0 + tau0);

  auto finish = [&](HomotopyStatus status) {
    auto nz = collect_nonzeros(st);
    res.support = std::move(nz.support);
    res.values = std::move(nz.values);
    res.tau_final = st.tau;
    res.path_length = breakpoints;
    res.status = status;
    return res;
  };

  for (;;) {
    if (breakpoints > max_breakpoints)
      throw DegeneratePathError("solve_to_cardinality: breakpoint budget exhausted (cycling?)");

    Vec dir = gram_direction(c, st);

    // b = C^T C_active dir, needed to track inactive correlations along the segment
    Vec v = c.apply_sparse(st.active, dir);
    Vec b = c.correlate(v);

    // smallest positive step; ties resolved toward the smallest column index
    double best_delta = kInf;
    std::size_t best_col = 0;
    char best_type = 0;
    double best_sign = 0.0;
    auto consider = [&](double delta, std::size_t col, char type, double sgn) {
      if (!(delta > delta_eps)) return;
      bool take = false;
      if (best_type == 0) {
        take = true;
      } else {
        const double tie = 1e-12 * (1.0 + std::min(delta, best_delta));
        if (delta < best_delta - tie)
          take = true;
        else if (std::abs(delta - best_delta) <= tie && col < best_col)
          take = true;
      }
      if (take) {
        best_delta = delta;
        best_col = col;
        best_type = type;
        best_sign = sgn;
      }
    };

    for (std::size_t i = 0; i < m; ++i) {
      if (is_active[i] || static_cast<long long>(i) == last_removed) continue;
      const double ci = corr[i], bi = b[i];
      if (1.0 - bi > 0.0) consider((st.tau - ci) / (1.0 - bi), i, 'A', +1.0);
      if (1.0 + bi > 0.0) consider((st.tau + ci) / (1.0 + bi), i, 'A', -1.0);
    }
    for (std::size_t t = 0; t < st.active.size(); ++t) {
      if (dir[t] == 0.0) continue;
      consider(-st.coef[t] / dir[t], st.active[t], 'R', 0.0);
    }

    const double delta_cap = st.tau - tau_floor;
    if (best_delta >= delta_cap) {
      // no event before the floor: step there and stop
      for (std::size_t t = 0; t < st.active.size(); ++t) st.coef[t] += delta_cap * dir[t];
      st.tau = tau_floor;
      ++breakpoints;
      if (trace) {
        std::size_t nnz = 0;
        for (double x : st.coef) nnz += (x != 0.0);
        trace->push_back({breakpoints, st.tau, 'F', 0, nnz});
      }
      return finish(tau_floor > 0.0 ? HomotopyStatus::reached_tau
                                    : HomotopyStatus::path_exhausted);
    }

    // step to the breakpoint and apply its event
    for (std::size_t t = 0; t < st.active.size(); ++t) st.coef[t] += best_delta * dir[t];
    st.tau -= best_delta;
    last_removed = -1;
    if (best_type == 'A') {
      st.active.push_back(best_col);
      st.coef.push_back(0.0);
      st.sign.push_back(best_sign);
      is_active[best_col] = 1;
    } else {
      std::size_t t = 0;
      while (st.active[t] != best_col) ++t;
      st.active.erase(st.active.begin() + static_cast<long long>(t));
      st.coef.erase(st.coef.begin() + static_cast<long long>(t));
      st.sign.erase(st.sign.begin() + static_cast<long long>(t));
      is_active[best_col] = 0;
      last_removed = static_cast<long long>(best_col);
    }
    ++breakpoints;

    // refresh the correlations from scratch at the breakpoint; this keeps the
    // path numerically anchored and doubles as the KKT certificate
    Vec residual = y;
    {
      Vec ch = c.apply_sparse(st.active, st.coef);
      for (std::size_t i = 0; i < m; ++i) residual[i] -= ch[i];
    }
    corr = c.correlate(residual);
    std::size_t nnz = 0;
    std::vector<char> on_support(m, 0);
    for (std::size_t t = 0; t < st.active.size(); ++t) {
      if (st.coef[t] != 0.0) {
        ++nnz;
        on_support[st.active[t]] = 1;
        res.kkt_active_violation = std::max(
            res.kkt_active_violation, std::abs(corr[st.active[t]] - st.tau * sign_of(st.coef[t])));
      }
    }
    double max_off = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (!on_support[i]) max_off = std::max(max_off, std::abs(corr[i]));
    res.kkt_inactive_excess = std::max(res.kkt_inactive_excess, std::max(0.0, max_off - st.tau));

    if (trace) trace->push_back({breakpoints, st.tau, best_type, best_col, nnz});
    if (nnz == k_target) return finish(HomotopyStatus::reached_cardinality);

    if (norm_inf(corr) <= 1e-14 * tau0)
      return finish(HomotopyStatus::path_exhausted);  // residual vanished early
  }
}

KktReport verify_kkt(const CirculantOperator& c, const Vec& y,
                     const std::vector<std::size_t>& support, const Vec& values,
                     double tau) {
  const std::size_t m = c.size();
  Vec residual = y;
  Vec ch = c.apply_sparse(support, values);
  for (std::size_t i = 0; i < m; ++i) residual[i] -= ch[i];
  Vec corr = c.correlate(residual);

  KktReport rep;
  std::vector<char> on(m, 0);
  for (std::size_t t = 0; t < support.size(); ++t) {
    if (values[t] == 0.0) continue;
    on[support[t]] = 1;
    rep.active_violation = std::max(
        rep.active_violation, std::abs(corr[support[t]] - tau * sign_of(values[t])));
  }
  double max_off = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (!on[i]) max_off = std::max(max_off, std::abs(corr[i]));
  rep.inactive_excess = std::max(0.0, max_off - tau);
  rep.ok = rep.active_violation <= 1e-8 * std::max(1.0, tau) &&
           rep.inactive_excess <= 1e-8 * tau + 1e-300;
  return rep;
}

void write_path_trace_csv(const PathTrace& trace, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError(path + ": cannot open for writing");
  os << "breakpoint,tau,event,column,support_size\n";
  char buf[32];
  for (const auto& ev : trace) {
    std::snprintf(buf, sizeof(buf), "%.17g", ev.tau);
    os << ev.breakpoint << "," << buf << "," << ev.type << "," << ev.column << ","
       << ev.support_size << "\n";
  }
  if (!os) throw IoError(path + ": write failed");
}

Vec refit_on_support(const CirculantOperator& c, const Vec& y,
                     const std::vector<std::size_t>& support) {
  const std::size_t m = c.size();
  Matrix cols(m, support.size());
  for (std::size_t t = 0; t < support.size(); ++t) {
    Vec col = c.column(support[t]);
    for (std::size_t i = 0; i < m; ++i) cols(i, t) = col[i];
  }
  try {
    return lstsq(cols, y);
  } catch (const RankDeficiencyError& e) {
    throw DegeneratePathError(std::string("refit_on_support: ") + e.what());
  }
}

}  // namespace chanprot
