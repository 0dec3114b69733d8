/* chanprot: random-coding protection against sparse convolutive channels.
 *
 * C API over the recovery library. All functions return a cp_status; on
 * failure cp_last_error() carries a thread-local message. Objects returned
 * through cp_* handles are owned by the caller and released with the
 * matching *_free function. Array outputs fill caller-provided buffers
 * whose required sizes come from the accessor functions next to them.
 */
#ifndef CHANPROT_H
#define CHANPROT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define CHANPROT_VERSION_MAJOR 1
#define CHANPROT_VERSION_MINOR 0

typedef enum cp_status {
  CP_OK = 0,
  CP_ERR_INVALID_ARG = 1,   /* bad parameter or precondition violation */
  CP_ERR_DIMENSION = 2,     /* incompatible sizes */
  CP_ERR_RANK_DEFICIENT = 3,
  CP_ERR_DEGENERATE = 4,    /* degenerate homotopy path */
  CP_ERR_IO = 5,
  CP_ERR_INTERNAL = 6
} cp_status;

const char* cp_status_str(cp_status s);
/* message from the most recent failure on this thread ("" if none) */
const char* cp_last_error(void);

/* opaque handles */
typedef struct cp_matrix cp_matrix;               /* coding matrix A */
typedef struct cp_channel cp_channel;             /* sparse impulse response */
typedef struct cp_am_result cp_am_result;         /* alternating-minimization output */
typedef struct cp_block_result cp_block_result;   /* block-l1 output */
typedef struct cp_phase_diagram cp_phase_diagram; /* success-rate grid */

void cp_matrix_free(cp_matrix* a);
void cp_channel_free(cp_channel* h);
void cp_am_result_free(cp_am_result* r);
void cp_block_result_free(cp_block_result* r);
void cp_phase_diagram_free(cp_phase_diagram* d);
/* releases buffers allocated by cp_read_vector */
void cp_free(void* p);

/* --- seeded generation ---------------------------------------------------- */

/* substream derivation used throughout (SplitMix64 finalizer mix) */
uint64_t cp_mix_seed(uint64_t seed, uint64_t salt);

/* i.i.d. N(0,1) entries, deterministic per seed */
cp_status cp_gaussian_vector(size_t len, uint64_t seed, double* out);

/* m x n coding matrix, entries i.i.d. N(0, 1/m); requires 1 <= n < m */
cp_status cp_coding_matrix_generate(uint32_t m, uint32_t n, uint64_t seed,
                                    cp_matrix** out);
uint32_t cp_matrix_rows(const cp_matrix* a);
uint32_t cp_matrix_cols(const cp_matrix* a);
/* row-major copy into a rows*cols buffer */
cp_status cp_matrix_data(const cp_matrix* a, double* out);

/* codeword = A x; x has length n, out has length m */
cp_status cp_encode(const cp_matrix* a, const double* x, size_t x_len, double* out);

/* k-sparse channel, support uniform without replacement, taps N(0,1) */
cp_status cp_channel_generate(uint32_t m, uint32_t k, uint64_t seed, cp_channel** out);
cp_status cp_channel_from_parts(uint32_t m, uint32_t k, const uint32_t* support,
                                const double* taps, cp_channel** out);
uint32_t cp_channel_len(const cp_channel* h);      /* m */
uint32_t cp_channel_sparsity(const cp_channel* h); /* k */
cp_status cp_channel_support(const cp_channel* h, uint32_t* out); /* k entries */
cp_status cp_channel_taps(const cp_channel* h, double* out);      /* k entries */
cp_status cp_channel_dense(const cp_channel* h, double* out);     /* m entries */

/* y = codeword (x) h + N(0, sigma^2) noise; codeword and out have length m */
cp_status cp_channel_apply(const cp_channel* h, const double* codeword,
                           size_t codeword_len, double noise_sigma,
                           uint64_t noise_seed, double* out);

/* --- alternating-minimization recovery ------------------------------------ */

typedef struct cp_am_config {
  uint32_t r;          /* iterations per cardinality level */
  uint32_t k_max;      /* 0: floor(m/4) */
  uint32_t max_iters;  /* 0: r * k_max */
  double residual_tol; /* relative residual declaring convergence */
  int64_t init_delay;  /* >= 0: known strongest-path delay; -1: search */
  int debias;          /* nonzero: LS refit of taps each iteration */
} cp_am_config;

void cp_am_config_init(cp_am_config* cfg);

typedef enum cp_am_status {
  CP_AM_CONVERGED = 0,
  CP_AM_ITERATION_CAP = 1,
  CP_AM_CARDINALITY_CAP = 2,
  CP_AM_DEGENERATE = 3
} cp_am_status;

const char* cp_am_status_str(cp_am_status s);

cp_status cp_recover_am(const cp_matrix* a, const double* y, size_t y_len,
                        const cp_am_config* cfg, cp_am_result** out);
cp_am_status cp_am_result_status(const cp_am_result* r);
double cp_am_result_residual_rel(const cp_am_result* r);
uint64_t cp_am_result_iterations(const cp_am_result* r);
/* unit-norm signal estimate, length n */
cp_status cp_am_result_signal(const cp_am_result* r, double* out);
/* channel estimate as a fresh handle (empty estimates are CP_ERR_DEGENERATE) */
cp_status cp_am_result_channel(const cp_am_result* r, cp_channel** out);
/* per-iteration trace: iter,k_j,tau_j,residual,support */
cp_status cp_am_result_write_trace_csv(const cp_am_result* r, const char* path);

/* --- lifted block-l1 recovery ---------------------------------------------- */

typedef struct cp_block_config {
  double tol;          /* relative primal/dual residual tolerance */
  uint32_t max_iters;  /* splitting-iteration cap */
  double rho;          /* augmented-Lagrangian penalty */
  uint32_t m_cap;      /* desk-scale guard on m (the unknown has n*m entries) */
} cp_block_config;

void cp_block_config_init(cp_block_config* cfg);

cp_status cp_recover_block(const cp_matrix* a, const double* y, size_t y_len,
                           const cp_block_config* cfg, cp_block_result** out);
int cp_block_result_converged(const cp_block_result* r);
uint64_t cp_block_result_iterations(const cp_block_result* r);
double cp_block_result_objective(const cp_block_result* r);
double cp_block_result_feasibility_gap(const cp_block_result* r);
double cp_block_result_spectral_ratio(const cp_block_result* r);
cp_status cp_block_result_signal(const cp_block_result* r, double* out); /* n */
cp_status cp_block_result_channel(const cp_block_result* r, cp_channel** out);

/* --- experiment harness ---------------------------------------------------- */

typedef enum cp_method { CP_METHOD_AM = 0, CP_METHOD_BLOCK_L1 = 1 } cp_method;

typedef struct cp_trial_config {
  double success_tol;   /* alignment error below this counts as recovery */
  double noise_sigma;   /* additive noise level; 0 = noiseless */
  int judge_noisy;      /* nonzero: apply success_tol to noisy runs too */
  int known_strongest_path; /* nonzero: init at the true peak delay */
  cp_am_config am;
  cp_block_config block;
} cp_trial_config;

void cp_trial_config_init(cp_trial_config* cfg);

typedef struct cp_trial_record {
  int success;
  double rel_err_x;
  double rel_err_h;
  uint64_t iterations;
  char status[24];
  double ms;
  /* block-l1 extras; zero for AM trials */
  double objective;
  double feasibility_gap;
  double spectral_ratio;
} cp_trial_record;

/* one synthetic instance drawn from substreams of `seed`, then recovery */
cp_status cp_run_trial(uint32_t m, uint32_t n, uint32_t k, uint64_t seed,
                       cp_method method, const cp_trial_config* cfg,
                       cp_trial_record* out);

/* the two single-sided problems: known-channel LS and known-signal BPDN */
typedef struct cp_baseline_report {
  int ls_rank_ok;
  double ls_rel_err;
  int bpdn_ok;
  int bpdn_support_exact;
  double bpdn_rel_err;
} cp_baseline_report;

/* `bpdn_trace_path` (nullable) dumps the homotopy path of the known-signal
 * solve as CSV: breakpoint,tau,event,column,support_size */
cp_status cp_run_baselines(uint32_t m, uint32_t n, uint32_t k, uint64_t seed,
                           const char* bpdn_trace_path, cp_baseline_report* out);

typedef struct cp_phase_spec {
  uint32_t m;
  const uint32_t* n_values;
  size_t n_count;
  const uint32_t* k_values;
  size_t k_count;
  uint32_t trials;
  uint64_t base_seed;
  double success_tol;
} cp_phase_spec;

/* per-trial seeds derive from (base_seed, n, k, trial); output is
 * independent of `jobs` */
cp_status cp_phase_diagram_run(const cp_phase_spec* spec, cp_method method,
                               const cp_trial_config* cfg, uint32_t jobs,
                               cp_phase_diagram** out);
size_t cp_phase_diagram_n_count(const cp_phase_diagram* d);
size_t cp_phase_diagram_k_count(const cp_phase_diagram* d);

typedef struct cp_phase_cell {
  uint32_t n;
  uint32_t k;
  uint32_t successes;
  uint32_t trials;
  double rate;
  double mean_iterations;
  double mean_ms;
} cp_phase_cell;

cp_status cp_phase_diagram_cell(const cp_phase_diagram* d, size_t n_idx,
                                size_t k_idx, cp_phase_cell* out);
/* deterministic artifact: m,n,k,trials,successes,rate,mean_iterations */
cp_status cp_phase_diagram_write_csv(const cp_phase_diagram* d, const char* path);
cp_status cp_phase_diagram_read_csv(const char* path, cp_phase_diagram** out);
/* wall-clock sidecar; not byte-stable across runs */
cp_status cp_phase_diagram_write_timing_csv(const cp_phase_diagram* d, const char* path);
/* P5 image (k rows downward, n cols rightward) plus the 95% iso-rate cell
 * boundary at <path minus .pgm>.contour.csv */
cp_status cp_phase_diagram_render_pgm(const cp_phase_diagram* d, const char* path);

/* --- SCP1 binary container -------------------------------------------------
 * magic "SCP1", u32 rank, u32 dims[rank], little-endian f64 payload.
 */

cp_status cp_write_vector(const char* path, const double* v, size_t len);
/* allocates *out (release with cp_free) */
cp_status cp_read_vector(const char* path, double** out, size_t* len);
cp_status cp_matrix_write(const cp_matrix* a, const char* path);
cp_status cp_matrix_read(const char* path, cp_matrix** out);
cp_status cp_channel_write_csv(const cp_channel* h, const char* path);
cp_status cp_channel_read_csv(const char* path, cp_channel** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CHANPROT_H */
