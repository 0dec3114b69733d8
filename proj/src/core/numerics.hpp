#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace chanprot {

using Vec = std::vector<double>;
using CVec = std::vector<std::complex<double>>;

// Dense row-major real matrix.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

  Vec col(std::size_t j) const;

  // y = M * x
  Vec apply(const Vec& x) const;
  // y = M^T * x
  Vec apply_transposed(const Vec& x) const;

  static Matrix identity(std::size_t n);

private:
  std::size_t rows_ = 0, cols_ = 0;
  Vec a_;
};

struct QrFactors {
  Matrix q;  // m x n, orthonormal columns
  Matrix r;  // n x n, upper triangular, nonnegative diagonal
};

// --- vector helpers ---------------------------------------------------------

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);
double norm1(const Vec& v);
double norm_inf(const Vec& v);

// Throws DimensionError on NaN/Inf entries; `what` names the offending input.
void ensure_finite(const Vec& v, const char* what);

// --- Fourier ----------------------------------------------------------------
//
// Convention used throughout: unnormalized forward transform
//   X(w) = sum_t x(t) exp(-2*pi*i*w*t/m),
// inverse divides by m. Parseval then reads ||fft(v)||^2 = m * ||v||^2.
// Arbitrary lengths are supported (radix-2 with a Bluestein fallback).

CVec fft(const CVec& v);
CVec fft(const Vec& v);
CVec ifft(const CVec& v);

// Inverse transform of a spectrum known to come from real data; checks that
// the imaginary residue is <= 1e-9 * ||result|| and discards it.
Vec ifft_real(const CVec& v);

// output(j) = v((j - s) mod m); s may be negative or exceed m.
Vec circshift(const Vec& v, long long s);

// Circular convolution via FFT; inputs must have equal length.
Vec circconv(const Vec& a, const Vec& b);

// Circular cross-correlation c(j) = sum_t a(t) * b(t + j mod m).
// Equals C^T b for the circulant matrix C whose generator is `a`.
Vec circcorr(const Vec& a, const Vec& b);

// --- factorizations ---------------------------------------------------------

// Thin Householder QR, rows >= cols. Sign convention: diag(R) >= 0.
// Throws RankDeficiencyError when |R(i,i)| <= 1e-12 * max_j |R(j,j)|.
QrFactors qr(const Matrix& m);

// argmin ||M x - y||_2 via QR.
Vec lstsq(const Matrix& m, const Vec& y);
Vec lstsq(const QrFactors& f, const Vec& y);

// Solves the SPD system G x = b by Cholesky factorization.
// Throws DegeneratePathError when a pivot falls below 1e-12 * max diag.
Vec solve_spd(const Matrix& g, const Vec& b);

}  // namespace chanprot
