#include "numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace chanprot {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 transform; length must be a power of two.
void fft_pow2(CVec& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
    const std::size_t half = len / 2;
    // per-level twiddle table computed directly keeps roundoff flat
    CVec w(half);
    for (std::size_t j = 0; j < half; ++j)
      w[j] = std::polar(1.0, ang * static_cast<double>(j));
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const auto u = a[i + j];
        const auto v = a[i + j + half] * w[j];
        a[i + j] = u + v;
        a[i + j + half] = u - v;
      }
    }
  }
}

// Bluestein chirp-z transform for arbitrary lengths.
CVec fft_bluestein(const CVec& x, bool inverse) {
  const std::size_t m = x.size();
  const std::size_t l = next_pow2(2 * m - 1);
  const double sgn = inverse ? 1.0 : -1.0;
  CVec chirp(m);
  for (std::size_t j = 0; j < m; ++j) {
    // exponent j^2 mod 2m avoids precision loss for large j
    const std::size_t j2 = (static_cast<std::size_t>(j) * j) % (2 * m);
    chirp[j] = std::polar(1.0, sgn * kPi * static_cast<double>(j2) / static_cast<double>(m));
  }
  CVec a(l, 0.0), b(l, 0.0);
  for (std::size_t j = 0; j < m; ++j) a[j] = x[j] * chirp[j];
  b[0] = std::conj(chirp[0]);
  for (std::size_t j = 1; j < m; ++j) b[j] = b[l - j] = std::conj(chirp[j]);
  fft_pow2(a, false);
  fft_pow2(b, false);
  for (std::size_t j = 0; j < l; ++j) a[j] *= b[j];
  fft_pow2(a, true);
  const double inv_l = 1.0 / static_cast<double>(l);
  CVec out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = a[j] * inv_l * chirp[j];
  return out;
}

CVec fft_dispatch(CVec v, bool inverse) {
  if (v.empty()) throw DimensionError("fft: empty input");
  if (is_pow2(v.size())) {
    fft_pow2(v, inverse);
    return v;
  }
  return fft_bluestein(v, inverse);
}

}  // namespace

Vec Matrix::col(std::size_t j) const {
  Vec c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = a_[i * cols_ + j];
  return c;
}

Vec Matrix::apply(const Vec& x) const {
  if (x.size() != cols_) throw DimensionError("Matrix::apply: dimension mismatch");
  Vec y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* row = a_.data() + i * cols_;
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

Vec Matrix::apply_transposed(const Vec& x) const {
  if (x.size() != rows_) throw DimensionError("Matrix::apply_transposed: dimension mismatch");
  Vec y(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* row = a_.data() + i * cols_;
    const double xi = x[i];
    for (std::size_t j = 0; j < cols_; ++j) y[j] += row[j] * xi;
  }
  return y;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

double norm1(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double norm_inf(const Vec& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

void ensure_finite(const Vec& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw DimensionError(std::string(what) + ": non-finite entry");
}

CVec fft(const CVec& v) { return fft_dispatch(v, false); }

CVec fft(const Vec& v) {
  CVec c(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) c[i] = v[i];
  return fft_dispatch(std::move(c), false);
}

CVec ifft(const CVec& v) {
  CVec out = fft_dispatch(v, true);
  const double inv_m = 1.0 / static_cast<double>(v.size());
  for (auto& z : out) z *= inv_m;
  return out;
}

Vec ifft_real(const CVec& v) {
  CVec c = ifft(v);
  Vec out(c.size());
  double re2 = 0.0, im2 = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    out[i] = c[i].real();
    re2 += c[i].real() * c[i].real();
    im2 += c[i].imag() * c[i].imag();
  }
  if (std::sqrt(im2) > 1e-9 * std::max(std::sqrt(re2), 1e-300))
    throw DimensionError("ifft_real: imaginary residue above tolerance");
  return out;
}

Vec circshift(const Vec& v, long long s) {
  const long long m = static_cast<long long>(v.size());
  if (m == 0) throw DimensionError("circshift: empty input");
  long long r = s % m;
  if (r < 0) r += m;
  Vec out(v.size());
  for (long long j = 0; j < m; ++j) out[(j + r) % m] = v[j];
  return out;
}

Vec circconv(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("circconv: length mismatch");
  CVec fa = fft(a), fb = fft(b);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  return ifft_real(fa);
}

Vec circcorr(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("circcorr: length mismatch");
  CVec fa = fft(a), fb = fft(b);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] = std::conj(fa[i]) * fb[i];
  return ifft_real(fa);
}

QrFactors qr(const Matrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  if (rows < cols) throw DimensionError("qr: rows < cols");

  // Householder vectors accumulate in `work`; R forms in its upper triangle.
  Matrix work = m;
  std::vector<Vec> hh(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double alpha = 0.0;
    for (std::size_t i = j; i < rows; ++i) alpha += work(i, j) * work(i, j);
    alpha = std::sqrt(alpha);
    if (work(j, j) > 0) alpha = -alpha;

    Vec v(rows - j, 0.0);
    v[0] = work(j, j) - alpha;
    for (std::size_t i = j + 1; i < rows; ++i) v[i - j] = work(i, j);
    double vnorm2 = 0.0;
    for (double x : v) vnorm2 += x * x;

    if (vnorm2 > 0.0) {
      for (std::size_t c = j; c < cols; ++c) {
        double s = 0.0;
        for (std::size_t i = j; i < rows; ++i) s += v[i - j] * work(i, c);
        const double f = 2.0 * s / vnorm2;
        for (std::size_t i = j; i < rows; ++i) work(i, c) -= f * v[i - j];
      }
    }
    hh[j] = std::move(v);
  }

  double max_diag = 0.0;
  for (std::size_t j = 0; j < cols; ++j) max_diag = std::max(max_diag, std::abs(work(j, j)));
  for (std::size_t j = 0; j < cols; ++j)
    if (std::abs(work(j, j)) <= 1e-12 * max_diag)
      throw RankDeficiencyError("qr: rank-deficient matrix");

  // Form thin Q by applying the reflectors to the leading columns of I.
  Matrix q(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    Vec e(rows, 0.0);
    e[c] = 1.0;
    for (std::size_t j = cols; j-- > 0;) {
      const Vec& v = hh[j];
      double vnorm2 = 0.0;
      for (double x : v) vnorm2 += x * x;
      if (vnorm2 == 0.0) continue;
      double s = 0.0;
      for (std::size_t i = j; i < rows; ++i) s += v[i - j] * e[i];
      const double f = 2.0 * s / vnorm2;
      for (std::size_t i = j; i < rows; ++i) e[i] -= f * v[i - j];
    }
    for (std::size_t i = 0; i < rows; ++i) q(i, c) = e[i];
  }

  Matrix r(cols, cols);
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = i; j < cols; ++j) r(i, j) = work(i, j);

  // fix signs so diag(R) >= 0
  for (std::size_t i = 0; i < cols; ++i) {
    if (r(i, i) < 0.0) {
      for (std::size_t j = i; j < cols; ++j) r(i, j) = -r(i, j);
      for (std::size_t k = 0; k < rows; ++k) q(k, i) = -q(k, i);
    }
  }
  return {std::move(q), std::move(r)};
}

Vec lstsq(const QrFactors& f, const Vec& y) {
  if (y.size() != f.q.rows()) throw DimensionError("lstsq: rhs length mismatch");
  Vec b = f.q.apply_transposed(y);
  const std::size_t n = f.r.rows();
  Vec x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.r(i, j) * x[j];
    x[i] = s / f.r(i, i);
  }
  return x;
}

Vec lstsq(const Matrix& m, const Vec& y) { return lstsq(qr(m), y); }

Vec solve_spd(const Matrix& g, const Vec& b) {
  const std::size_t n = g.rows();
  if (g.cols() != n || b.size() != n) throw DimensionError("solve_spd: dimension mismatch");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, g(i, i));

  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = g(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 1e-12 * max_diag)
          throw DegeneratePathError("solve_spd: singular active-set system");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  Vec z(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * z[k];
    z[i] = s / l(i, i);
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = z[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

}  // namespace chanprot
