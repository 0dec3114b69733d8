#pragma once

#include <string>

#include "am.hpp"
#include "blockl1.hpp"
#include "io.hpp"

namespace chanprot {

enum class Method { am, block_l1 };

Method method_from_string(const std::string& s);
const char* to_string(Method m);

struct TrialConfig {
  double success_tol = 1e-4;
  double noise_sigma = 0.0;
  bool judge_noisy = false;  // noisy runs report errors but are not judged
  AmConfig am;               // init_delay is overridden when known_strongest_path
  BlockConfig block;
  bool known_strongest_path = true;  // seed the recovery with the true peak delay
};

struct TrialRecord {
  std::size_t m = 0, n = 0, k = 0;
  std::uint64_t seed = 0;
  Method method = Method::am;
  bool success = false;
  double rel_err_x = 0.0;
  double rel_err_h = 0.0;
  std::size_t iterations = 0;
  std::string status;
  double ms = 0.0;  // wall time; excluded from deterministic artifacts
  // block-l1 extras (zero for AM trials)
  double objective = 0.0;
  double feasibility_gap = 0.0;
  double spectral_ratio = 0.0;
};

// Draws (x, A, h) from substreams of `seed`, forms y, runs the chosen
// recovery and judges success through align_scale.
TrialRecord run_trial(std::size_t m, std::size_t n, std::size_t k, std::uint64_t seed,
                      Method method, const TrialConfig& cfg);

struct PhaseGridSpec {
  std::size_t m = 128;
  std::vector<std::size_t> n_values{4, 8, 16, 32, 64};
  std::vector<std::size_t> k_values{1, 2, 4, 8, 16};
  std::size_t trials = 5;
  std::uint64_t base_seed = 1;
  double success_tol = 1e-4;
};

struct PhaseCell {
  std::size_t n = 0, k = 0;
  std::size_t successes = 0;
  double mean_iterations = 0.0;
  double mean_ms = 0.0;
};

struct PhaseDiagram {
  PhaseGridSpec spec;
  std::vector<PhaseCell> cells;  // ordered by (n ascending, k ascending)

  const PhaseCell& cell(std::size_t n_idx, std::size_t k_idx) const;
  double rate(const PhaseCell& c) const {
    return static_cast<double>(c.successes) / static_cast<double>(spec.trials);
  }
};

// Per-trial seeds derive from (base_seed, n, k, trial); the outcome is
// independent of execution order and of `jobs`.
PhaseDiagram run_phase_diagram(const PhaseGridSpec& spec, Method method,
                               const TrialConfig& cfg, std::size_t jobs = 1);

// Deterministic artifact: m,n,k,trials,successes,rate,mean_iterations.
void write_diagram_csv(const PhaseDiagram& d, const std::string& path);
PhaseDiagram read_diagram_csv(const std::string& path);

// Wall-time sidecar; not byte-stable across runs.
void write_diagram_timing_csv(const PhaseDiagram& d, const std::string& path);

// P5 image, rows = k ascending downward, cols = n ascending rightward,
// pixel = round-half-up(255 * rate). Also writes the 95% iso-rate cell
// boundary (cells >= 0.95 adjacent to a cell < 0.95) next to `pgm_path`
// with the extension replaced by ".contour.csv".
void render_pgm(const PhaseDiagram& d, const std::string& pgm_path);

std::string contour_path_for(const std::string& pgm_path);

struct BaselineReport {
  std::size_t m = 0, n = 0, k = 0;
  std::uint64_t seed = 0;
  // known channel -> least-squares signal recovery
  bool ls_rank_ok = false;
  double ls_rel_err = 0.0;
  // known signal -> homotopy channel recovery (refit on the found support)
  bool bpdn_ok = false;  // solver completed without a degenerate path
  bool bpdn_support_exact = false;
  double bpdn_rel_err = 0.0;
};

// The two single-sided recovery problems on one synthetic instance. A
// nonempty `bpdn_trace_csv` dumps the homotopy path of the known-signal solve.
BaselineReport run_baselines(std::size_t m, std::size_t n, std::size_t k,
                             std::uint64_t seed, const std::string& bpdn_trace_csv = "");

// Substream tags used when deriving instance seeds; shared by run_trial and
// run_baselines so both see the same instance for a given seed.
enum : std::uint64_t {
  kSeedSignal = 1,
  kSeedMatrix = 2,
  kSeedChannel = 3,
  kSeedNoise = 4
};

}  // namespace chanprot
