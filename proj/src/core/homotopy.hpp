#pragma once

#include <cstdint>
#include <optional>

#include "numerics.hpp"

namespace chanprot {

// Implicit m x m circulant matrix whose column j is circshift(generator, j).
// The spectrum and circular autocorrelation of the generator are cached so
// matvecs, correlations and Gram entries come out of FFT-sized work.
class CirculantOperator {
public:
  explicit CirculantOperator(Vec generator);

  std::size_t size() const { return g_.size(); }
  const Vec& generator() const { return g_; }

  Vec column(std::size_t j) const;

  // C * h for h given as (indices, values)
  Vec apply_sparse(const std::vector<std::size_t>& support, const Vec& values) const;
  // C * h for dense h, via the cached spectrum
  Vec apply_dense(const Vec& h) const;
  // C^T r
  Vec correlate(const Vec& r) const;
  // <column i, column j> = autocorr((i - j) mod m)
  double autocorr(std::size_t lag) const { return acorr_[lag]; }

private:
  Vec g_;
  CVec spec_;
  Vec acorr_;
};

enum class HomotopyStatus { reached_cardinality, reached_tau, path_exhausted };

struct PathEvent {
  std::size_t breakpoint;   // 1-based along the path
  double tau;
  char type;                // 'A' add, 'R' remove, 'F' forced stop at tau floor
  std::size_t column;       // affected column ('F': unused, 0)
  std::size_t support_size; // nonzero count after the event
};

using PathTrace = std::vector<PathEvent>;

struct HomotopyResult {
  std::vector<std::size_t> support;  // ascending; strictly nonzero coefficients
  Vec values;
  double tau_final = 0.0;
  std::size_t path_length = 0;  // breakpoints processed
  HomotopyStatus status = HomotopyStatus::reached_tau;
  // worst KKT residuals observed over the whole path (absolute scale)
  double kkt_active_violation = 0.0;
  double kkt_inactive_excess = 0.0;

  Vec dense_solution(std::size_t m) const;
};

// Traces the LASSO path of  min 1/2 ||C h - y||^2 + tau ||h||_1  from
// tau0 = ||C^T y||_inf downward, adding or removing one column per
// breakpoint. Returns at the first breakpoint whose solution has exactly
// k_target nonzeros, or when tau reaches tau_floor (default
// 1e-12 * tau0), whichever comes first. Ties break to the smallest column
// index. A singular active-set Gram system throws DegeneratePathError.
HomotopyResult solve_to_cardinality(const CirculantOperator& c, const Vec& y,
                                    std::size_t k_target, double tau_floor = -1.0,
                                    PathTrace* trace = nullptr);

struct KktReport {
  double active_violation = 0.0;  // max |c_i - tau * sign(h_i)| over the support
  double inactive_excess = 0.0;   // max(0, max_i |c_i| - tau) off the support
  bool ok = false;                // within the standard certification bounds
};

// Certifies (h, tau) as the global LASSO minimizer via the KKT conditions.
KktReport verify_kkt(const CirculantOperator& c, const Vec& y,
                     const std::vector<std::size_t>& support, const Vec& values,
                     double tau);

// Exact least-squares refit of the coefficients on a fixed support;
// removes the l1 shrinkage bias. Throws on rank-deficient column sets.
Vec refit_on_support(const CirculantOperator& c, const Vec& y,
                     const std::vector<std::size_t>& support);

// Debug dump: breakpoint,tau,event,column,support_size.
void write_path_trace_csv(const PathTrace& trace, const std::string& path);

}  // namespace chanprot
