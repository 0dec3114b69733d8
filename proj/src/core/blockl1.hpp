#pragma once

#include "channel.hpp"
#include "codec.hpp"

namespace chanprot {

// Implicit m x mn block Gaussian circulant operator [A  S^1 A ... S^(m-1) A]
// acting on the lifted unknown U (n x m, column i = h(i) * x).
class BlockOperator {
public:
  explicit BlockOperator(CodingMatrix a);

  std::size_t m() const { return a_.m; }
  std::size_t n() const { return a_.n; }
  const CodingMatrix& coding_matrix() const { return a_; }

  // sum_i circshift(A U_i, i)
  Vec apply(const Matrix& u) const;
  // column i of the result = A^T circshift(v, -i)
  Matrix adjoint(const Vec& v) const;

private:
  CodingMatrix a_;
};

struct BlockConfig {
  double tol = 1e-6;             // relative primal/dual residual tolerance
  std::size_t max_iters = 5000;  // ADMM iteration cap
  double rho = 1.0;              // augmented-Lagrangian penalty
  double cg_tol = 1e-12;         // relative tolerance of the projection solves
  std::size_t cg_max_iters = 0;  // 0 -> 4 * m
  std::size_t m_cap = 64;        // desk-scale guard: the unknown has n*m entries
};

enum class BlockStatus { converged, iteration_cap };

struct BlockSolution {
  Matrix u_hat;                  // n x m, exact column sparsity
  double objective = 0.0;        // sum_i ||U_i||_2
  double feasibility_gap = 0.0;  // ||A vec(U) - y||_2 / ||y||_2 (0 for y = 0)
  Vec x_hat;                     // unit norm; zero when u_hat = 0
  Channel h_hat;                 // empty when u_hat = 0
  double spectral_ratio = 0.0;   // sigma2 / sigma1 of u_hat
  BlockStatus status = BlockStatus::iteration_cap;
  std::size_t iterations = 0;
};

// Columns with norm <= thresh map to zero; the rest shrink radially.
Matrix block_soft_threshold(const Matrix& v, double thresh);

// Solves  minimize sum_i ||U_i||_2  subject to  y = A vec(U)  by
// alternating-direction splitting: the feasibility projection uses
// conjugate-gradient solves against the operator/adjoint pair, the prox step
// is the per-column block soft threshold. The returned U is the thresholded
// iterate, so its column sparsity is exact. (x_hat, h_hat) come from the
// dominant singular pair of U via power iteration with a fixed seed start;
// the sign is fixed so the largest-magnitude entry of x_hat is positive.
BlockSolution solve_block_l1(const BlockOperator& op, const Vec& y,
                             const BlockConfig& cfg = {});

}  // namespace chanprot
