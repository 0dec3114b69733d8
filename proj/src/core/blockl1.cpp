#include "blockl1.hpp"

#include <algorithm>
#include <cmath>

#include "rng.hpp"

namespace chanprot {

namespace {

double frob_norm(const Matrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * m(i, j);
  return std::sqrt(s);
}

struct SingularPair {
  double sigma = 0.0;
  Vec left;   // length n
  Vec right;  // length m
};

// Dominant singular pair by power iteration on U^T U; fixed seed start.
SingularPair dominant_pair(const Matrix& u, std::uint64_t seed) {
  const std::size_t n = u.rows(), m = u.cols();
  SingularPair out;
  out.left.assign(n, 0.0);
  out.right.assign(m, 0.0);

  Rng rng(seed);
  Vec v = rng.gaussian_vec(m);
  double vn = norm2(v);
  for (auto& x : v) x /= vn;

  double sigma2_prev = -1.0;
  for (std::size_t it = 0; it < 10000; ++it) {
    Vec uv = u.apply(v);
    Vec w = u.apply_transposed(uv);
    const double sigma2 = norm2(w);
    if (sigma2 == 0.0) return out;  // U annihilates the iterate: treat as zero
    for (auto& x : w) x /= sigma2;
    v = std::move(w);
    if (sigma2_prev >= 0.0 && std::abs(sigma2 - sigma2_prev) <= 1e-10 * sigma2) break;
    sigma2_prev = sigma2;
  }

  Vec uv = u.apply(v);
  out.sigma = norm2(uv);
  if (out.sigma == 0.0) return out;
  for (auto& x : uv) x /= out.sigma;
  out.left = std::move(uv);
  out.right = std::move(v);
  return out;
}

}  // namespace

BlockOperator::BlockOperator(CodingMatrix a) : a_(std::move(a)) {}

Vec BlockOperator::apply(const Matrix& u) const {
  const std::size_t m = a_.m, n = a_.n;
  if (u.rows() != n || u.cols() != m) throw DimensionError("BlockOperator::apply: U must be n x m");
  // out(t) = sum_i (A U_i)((t - i) mod m): accumulate shifted matvecs
  Vec out(m, 0.0);
  Vec ui(n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t r = 0; r < n; ++r) ui[r] = u(r, i);
    bool all_zero = true;
    for (double x : ui)
      if (x != 0.0) {
        all_zero = false;
        break;
      }
    if (all_zero) continue;
    const Vec aui = a_.a.apply(ui);
    for (std::size_t t = 0; t < m; ++t) out[(t + i) % m] += aui[t];
  }
  return out;
}

Matrix BlockOperator::adjoint(const Vec& v) const {
  const std::size_t m = a_.m, n = a_.n;
  if (v.size() != m) throw DimensionError("BlockOperator::adjoint: length mismatch");
  Matrix out(n, m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec shifted = circshift(v, -static_cast<long long>(i));
    const Vec col = a_.a.apply_transposed(shifted);
    for (std::size_t r = 0; r < n; ++r) out(r, i) = col[r];
  }
  return out;
}

Matrix block_soft_threshold(const Matrix& v, double thresh) {
  Matrix out(v.rows(), v.cols());
  for (std::size_t j = 0; j < v.cols(); ++j) {
    double nrm = 0.0;
    for (std::size_t i = 0; i < v.rows(); ++i) nrm += v(i, j) * v(i, j);
    nrm = std::sqrt(nrm);
    if (nrm > thresh) {
      const double scale = 1.0 - thresh / nrm;
      for (std::size_t i = 0; i < v.rows(); ++i) out(i, j) = scale * v(i, j);
    }
    // columns at or below the threshold stay exactly zero
  }
  return out;
}

BlockSolution solve_block_l1(const BlockOperator& op, const Vec& y, const BlockConfig& cfg) {
  const std::size_t m = op.m(), n = op.n();
  if (y.size() != m) throw DimensionError("solve_block_l1: y length != m");
  if (m > cfg.m_cap)
    throw DimensionError("solve_block_l1: m exceeds the desk-scale cap (raise m_cap to override)");
  ensure_finite(y, "solve_block_l1: y");

  const std::size_t cg_cap = cfg.cg_max_iters ? cfg.cg_max_iters : 4 * m;
  const double ynorm = norm2(y);

  // gram(v) = A A* v, the projection kernel
  auto gram = [&](const Vec& v) { return op.apply(op.adjoint(v)); };

  Vec multiplier(m, 0.0);  // warm start across projections

  // project V onto { U : A vec(U) = y }
  auto project = [&](const Matrix& v) {
    Vec rhs = op.apply(v);
    for (std::size_t i = 0; i < m; ++i) rhs[i] -= y[i];
    // CG on A A* s = rhs
    Vec& s = multiplier;
    Vec resid = gram(s);
    for (std::size_t i = 0; i < m; ++i) resid[i] = rhs[i] - resid[i];
    Vec p = resid;
    double rr = dot(resid, resid);
    const double stop = cfg.cg_tol * std::max(norm2(rhs), 1e-300);
    for (std::size_t it = 0; it < cg_cap && std::sqrt(rr) > stop; ++it) {
      const Vec gp = gram(p);
      const double alpha = rr / dot(p, gp);
      for (std::size_t i = 0; i < m; ++i) s[i] += alpha * p[i];
      for (std::size_t i = 0; i < m; ++i) resid[i] -= alpha * gp[i];
      const double rr_new = dot(resid, resid);
      const double beta = rr_new / rr;
      rr = rr_new;
      for (std::size_t i = 0; i < m; ++i) p[i] = resid[i] + beta * p[i];
    }
    const Matrix corr = op.adjoint(s);
    Matrix out(n, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) out(i, j) = v(i, j) - corr(i, j);
    return out;
  };

  Matrix z(n, m), w(n, m);
  BlockSolution sol;
  sol.status = BlockStatus::iteration_cap;

  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    Matrix v(n, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) v(i, j) = z(i, j) - w(i, j);
    const Matrix u = project(v);

    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) v(i, j) = u(i, j) + w(i, j);
    Matrix z_next = block_soft_threshold(v, 1.0 / cfg.rho);

    double primal = 0.0, dual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double pd = u(i, j) - z_next(i, j);
        const double dd = z_next(i, j) - z(i, j);
        primal += pd * pd;
        dual += dd * dd;
        w(i, j) += pd;
      }
    }
    primal = std::sqrt(primal);
    dual = cfg.rho * std::sqrt(dual);
    z = std::move(z_next);
    sol.iterations = it;

    const double primal_scale = std::max({frob_norm(u), frob_norm(z), 1.0});
    const double dual_scale = std::max(cfg.rho * frob_norm(w), 1.0);
    if (primal <= cfg.tol * primal_scale && dual <= cfg.tol * dual_scale) {
      sol.status = BlockStatus::converged;
      break;
    }
  }

  // report on the thresholded iterate: its column sparsity is exact
  sol.u_hat = z;
  for (std::size_t j = 0; j < m; ++j) {
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += z(i, j) * z(i, j);
    sol.objective += std::sqrt(nrm);
  }
  {
    Vec r = op.apply(z);
    for (std::size_t i = 0; i < m; ++i) r[i] -= y[i];
    sol.feasibility_gap = ynorm > 0.0 ? norm2(r) / ynorm : norm2(r);
  }

  // rank-1 extraction
  std::size_t nonzero_cols = 0;
  for (std::size_t j = 0; j < m && nonzero_cols < 2; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (z(i, j) != 0.0) {
        ++nonzero_cols;
        break;
      }

  const SingularPair top = dominant_pair(z, 0x7a11d5eedull);
  sol.x_hat.assign(n, 0.0);
  if (top.sigma > 0.0) {
    Vec x = top.left;
    std::size_t peak = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(x[i]) > std::abs(x[peak])) peak = i;
    const double flip = x[peak] < 0.0 ? -1.0 : 1.0;
    for (auto& e : x) e *= flip;
    sol.x_hat = std::move(x);

    Vec h = z.apply_transposed(sol.x_hat);  // sigma * right vector, sign-fixed
    sol.h_hat = sparsify(h);

    if (nonzero_cols <= 1) {
      sol.spectral_ratio = 0.0;  // a single nonzero column has rank <= 1
    } else {
      Matrix deflated = z;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
          deflated(i, j) -= top.sigma * top.left[i] * top.right[j];
      const SingularPair second = dominant_pair(deflated, 0x5eed2ull);
      sol.spectral_ratio = second.sigma / top.sigma;
    }
  }
  return sol;
}

}  // namespace chanprot
