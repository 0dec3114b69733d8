#include "chanprot/chanprot.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "core/am.hpp"
#include "core/blockl1.hpp"
#include "core/channel.hpp"
#include "core/codec.hpp"
#include "core/experiments.hpp"
#include "core/io.hpp"
#include "core/rng.hpp"

using namespace chanprot;

extern "C" {

struct cp_matrix {
  CodingMatrix rep;
};
struct cp_channel {
  Channel rep;
};
struct cp_am_result {
  RecoveryResult rep;
  std::size_t n;
};
struct cp_block_result {
  BlockSolution rep;
};
struct cp_phase_diagram {
  PhaseDiagram rep;
};

}  // extern "C"

namespace {

thread_local std::string g_last_error;

cp_status fail(cp_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs `fn`, translating the library's exception taxonomy into status codes.
template <typename Fn>
cp_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const DimensionError& e) {
    return fail(CP_ERR_DIMENSION, e.what());
  } catch (const RankDeficiencyError& e) {
    return fail(CP_ERR_RANK_DEFICIENT, e.what());
  } catch (const DegeneratePathError& e) {
    return fail(CP_ERR_DEGENERATE, e.what());
  } catch (const IoError& e) {
    return fail(CP_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(CP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CP_ERR_INTERNAL, "unknown error");
  }
}

cp_status require(bool cond, const char* msg) {
  return cond ? CP_OK : fail(CP_ERR_INVALID_ARG, msg);
}

}  // namespace

extern "C" {

const char* cp_status_str(cp_status s) {
  switch (s) {
    case CP_OK: return "ok";
    case CP_ERR_INVALID_ARG: return "invalid argument";
    case CP_ERR_DIMENSION: return "dimension mismatch";
    case CP_ERR_RANK_DEFICIENT: return "rank-deficient matrix";
    case CP_ERR_DEGENERATE: return "degenerate path";
    case CP_ERR_IO: return "i/o error";
    case CP_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* cp_last_error(void) { return g_last_error.c_str(); }

void cp_matrix_free(cp_matrix* a) { delete a; }
void cp_channel_free(cp_channel* h) { delete h; }
void cp_am_result_free(cp_am_result* r) { delete r; }
void cp_block_result_free(cp_block_result* r) { delete r; }
void cp_phase_diagram_free(cp_phase_diagram* d) { delete d; }
void cp_free(void* p) { std::free(p); }

uint64_t cp_mix_seed(uint64_t seed, uint64_t salt) { return mix_seed(seed, salt); }

cp_status cp_gaussian_vector(size_t len, uint64_t seed, double* out) {
  if (cp_status s = require(out != nullptr && len > 0, "cp_gaussian_vector: bad buffer"); s != CP_OK)
    return s;
  return guarded([&] {
    const Vec v = Rng(seed).gaussian_vec(len);
    std::memcpy(out, v.data(), len * sizeof(double));
    return CP_OK;
  });
}

cp_status cp_coding_matrix_generate(uint32_t m, uint32_t n, uint64_t seed, cp_matrix** out) {
  if (cp_status s = require(out != nullptr, "cp_coding_matrix_generate: null out"); s != CP_OK)
    return s;
  return guarded([&] {
    auto* h = new cp_matrix{generate_coding_matrix(m, n, seed)};
    *out = h;
    return CP_OK;
  });
}

uint32_t cp_matrix_rows(const cp_matrix* a) { return a ? static_cast<uint32_t>(a->rep.m) : 0; }
uint32_t cp_matrix_cols(const cp_matrix* a) { return a ? static_cast<uint32_t>(a->rep.n) : 0; }

cp_status cp_matrix_data(const cp_matrix* a, double* out) {
  if (cp_status s = require(a && out, "cp_matrix_data: null argument"); s != CP_OK) return s;
  std::memcpy(out, a->rep.a.data(), a->rep.m * a->rep.n * sizeof(double));
  return CP_OK;
}

cp_status cp_encode(const cp_matrix* a, const double* x, size_t x_len, double* out) {
  if (cp_status s = require(a && x && out, "cp_encode: null argument"); s != CP_OK) return s;
  return guarded([&] {
    const Vec y = encode(a->rep, Vec(x, x + x_len));
    std::memcpy(out, y.data(), y.size() * sizeof(double));
    return CP_OK;
  });
}

cp_status cp_channel_generate(uint32_t m, uint32_t k, uint64_t seed, cp_channel** out) {
  if (cp_status s = require(out != nullptr, "cp_channel_generate: null out"); s != CP_OK) return s;
  return guarded([&] {
    *out = new cp_channel{generate_channel(m, k, seed)};
    return CP_OK;
  });
}

cp_status cp_channel_from_parts(uint32_t m, uint32_t k, const uint32_t* support,
                                const double* taps, cp_channel** out) {
  if (cp_status s = require(support && taps && out, "cp_channel_from_parts: null argument");
      s != CP_OK)
    return s;
  return guarded([&] {
    std::vector<std::size_t> sup(support, support + k);
    *out = new cp_channel{make_channel(m, std::move(sup), Vec(taps, taps + k))};
    return CP_OK;
  });
}

uint32_t cp_channel_len(const cp_channel* h) { return h ? static_cast<uint32_t>(h->rep.m) : 0; }
uint32_t cp_channel_sparsity(const cp_channel* h) {
  return h ? static_cast<uint32_t>(h->rep.sparsity()) : 0;
}

cp_status cp_channel_support(const cp_channel* h, uint32_t* out) {
  if (cp_status s = require(h && out, "cp_channel_support: null argument"); s != CP_OK) return s;
  for (std::size_t i = 0; i < h->rep.support.size(); ++i)
    out[i] = static_cast<uint32_t>(h->rep.support[i]);
  return CP_OK;
}

cp_status cp_channel_taps(const cp_channel* h, double* out) {
  if (cp_status s = require(h && out, "cp_channel_taps: null argument"); s != CP_OK) return s;
  std::memcpy(out, h->rep.taps.data(), h->rep.taps.size() * sizeof(double));
  return CP_OK;
}

cp_status cp_channel_dense(const cp_channel* h, double* out) {
  if (cp_status s = require(h && out, "cp_channel_dense: null argument"); s != CP_OK) return s;
  const Vec d = dense(h->rep);
  std::memcpy(out, d.data(), d.size() * sizeof(double));
  return CP_OK;
}

cp_status cp_channel_apply(const cp_channel* h, const double* codeword, size_t codeword_len,
                           double noise_sigma, uint64_t noise_seed, double* out) {
  if (cp_status s = require(h && codeword && out, "cp_channel_apply: null argument"); s != CP_OK)
    return s;
  return guarded([&] {
    const Received r =
        apply_channel(Vec(codeword, codeword + codeword_len), h->rep, noise_sigma, noise_seed);
    std::memcpy(out, r.y.data(), r.y.size() * sizeof(double));
    return CP_OK;
  });
}

void cp_am_config_init(cp_am_config* cfg) {
  if (!cfg) return;
  cfg->r = 3;
  cfg->k_max = 0;
  cfg->max_iters = 0;
  cfg->residual_tol = 1e-6;
  cfg->init_delay = -1;
  cfg->debias = 1;
}

const char* cp_am_status_str(cp_am_status s) {
  switch (s) {
    case CP_AM_CONVERGED: return "converged";
    case CP_AM_ITERATION_CAP: return "iteration-cap";
    case CP_AM_CARDINALITY_CAP: return "cardinality-cap";
    case CP_AM_DEGENERATE: return "degenerate";
  }
  return "unknown";
}

}  // extern "C"

namespace {

AmConfig to_core(const cp_am_config& c) {
  AmConfig cfg;
  cfg.r = c.r ? c.r : 1;
  cfg.k_max = c.k_max;
  cfg.max_iters = c.max_iters;
  cfg.residual_tol = c.residual_tol;
  cfg.init_delay = c.init_delay;
  cfg.debias = c.debias != 0;
  return cfg;
}

BlockConfig to_core(const cp_block_config& c) {
  BlockConfig cfg;
  cfg.tol = c.tol;
  cfg.max_iters = c.max_iters;
  cfg.rho = c.rho;
  cfg.m_cap = c.m_cap;
  return cfg;
}

cp_am_status to_c(AmStatus s) {
  switch (s) {
    case AmStatus::converged: return CP_AM_CONVERGED;
    case AmStatus::iteration_cap: return CP_AM_ITERATION_CAP;
    case AmStatus::cardinality_cap: return CP_AM_CARDINALITY_CAP;
    case AmStatus::degenerate: return CP_AM_DEGENERATE;
  }
  return CP_AM_DEGENERATE;
}

}  // namespace

extern "C" {

cp_status cp_recover_am(const cp_matrix* a, const double* y, size_t y_len,
                        const cp_am_config* cfg, cp_am_result** out) {
  if (cp_status s = require(a && y && cfg && out, "cp_recover_am: null argument"); s != CP_OK)
    return s;
  return guarded([&] {
    auto* res = new cp_am_result{recover(a->rep, Vec(y, y + y_len), to_core(*cfg)), a->rep.n};
    *out = res;
    return CP_OK;
  });
}

cp_am_status cp_am_result_status(const cp_am_result* r) {
  return r ? to_c(r->rep.status) : CP_AM_DEGENERATE;
}

double cp_am_result_residual_rel(const cp_am_result* r) { return r ? r->rep.residual_rel : -1.0; }

uint64_t cp_am_result_iterations(const cp_am_result* r) { return r ? r->rep.iterations : 0; }

cp_status cp_am_result_signal(const cp_am_result* r, double* out) {
  if (cp_status s = require(r && out, "cp_am_result_signal: null argument"); s != CP_OK) return s;
  std::memcpy(out, r->rep.x_hat.data(), r->rep.x_hat.size() * sizeof(double));
  return CP_OK;
}

cp_status cp_am_result_channel(const cp_am_result* r, cp_channel** out) {
  if (cp_status s = require(r && out, "cp_am_result_channel: null argument"); s != CP_OK) return s;
  if (r->rep.h_hat.support.empty())
    return fail(CP_ERR_DEGENERATE, "cp_am_result_channel: empty channel estimate");
  *out = new cp_channel{r->rep.h_hat};
  return CP_OK;
}

cp_status cp_am_result_write_trace_csv(const cp_am_result* r, const char* path) {
  if (cp_status s = require(r && path, "cp_am_result_write_trace_csv: null argument"); s != CP_OK)
    return s;
  return guarded([&] {
    std::FILE* f = std::fopen(path, "w");
    if (!f) throw IoError(std::string(path) + ": cannot open for writing");
    std::fputs("iter,k_j,tau_j,residual,support\n", f);
    for (const auto& rec : r->rep.trace) {
      std::string sup;
      for (std::size_t i = 0; i < rec.support.size(); ++i) {
        if (i) sup += ';';
        sup += std::to_string(rec.support[i]);
      }
      std::fprintf(f, "%zu,%zu,%s,%s,%s\n", rec.iter, rec.k, format_double(rec.tau).c_str(),
                   format_double(rec.residual).c_str(), sup.c_str());
    }
    std::fclose(f);
    return CP_OK;
  });
}

void cp_block_config_init(cp_block_config* cfg) {
  if (!cfg) return;
  cfg->tol = 1e-6;
  cfg->max_iters = 5000;
  cfg->rho = 1.0;
  cfg->m_cap = 64;
}

cp_status cp_recover_block(const cp_matrix* a, const double* y, size_t y_len,
                           const cp_block_config* cfg, cp_block_result** out) {
  if (cp_status s = require(a && y && cfg && out, "cp_recover_block: null argument"); s != CP_OK)
    return s;
  return guarded([&] {
    const BlockOperator op(a->rep);
    *out = new cp_block_result{solve_block_l1(op, Vec(y, y + y_len), to_core(*cfg))};
    return CP_OK;
  });
}

int cp_block_result_converged(const cp_block_result* r) {
  return r && r->rep.status == BlockStatus::converged ? 1 : 0;
}
uint64_t cp_block_result_iterations(const cp_block_result* r) { return r ? r->rep.iterations : 0; }
double cp_block_result_objective(const cp_block_result* r) { return r ? r->rep.objective : -1.0; }
double cp_block_result_feasibility_gap(const cp_block_result* r) {
  return r ? r->rep.feasibility_gap : -1.0;
}
double cp_block_result_spectral_ratio(const cp_block_result* r) {
  return r ? r->rep.spectral_ratio : -1.0;
}

cp_status cp_block_result_signal(const cp_block_result* r, double* out) {
  if (cp_status s = require(r && out, "cp_block_result_signal: null argument"); s != CP_OK)
    return s;
  std::memcpy(out, r->rep.x_hat.data(), r->rep.x_hat.size() * sizeof(double));
  return CP_OK;
}

cp_status cp_block_result_channel(const cp_block_result* r, cp_channel** out) {
  if (cp_status s = require(r && out, "cp_block_result_channel: null argument"); s != CP_OK)
    return s;
  if (r->rep.h_hat.support.empty())
    return fail(CP_ERR_DEGENERATE, "cp_block_result_channel: empty channel estimate");
  *out = new cp_channel{r->rep.h_hat};
  return CP_OK;
}

void cp_trial_config_init(cp_trial_config* cfg) {
  if (!cfg) return;
  cfg->success_tol = 1e-4;
  cfg->noise_sigma = 0.0;
  cfg->judge_noisy = 0;
  cfg->known_strongest_path = 1;
  cp_am_config_init(&cfg->am);
  cp_block_config_init(&cfg->block);
}

}  // extern "C"

namespace {

TrialConfig to_core(const cp_trial_config& c) {
  TrialConfig cfg;
  cfg.success_tol = c.success_tol;
  cfg.noise_sigma = c.noise_sigma;
  cfg.judge_noisy = c.judge_noisy != 0;
  cfg.known_strongest_path = c.known_strongest_path != 0;
  cfg.am = to_core(c.am);
  cfg.block = to_core(c.block);
  return cfg;
}

}  // namespace

extern "C" {

cp_status cp_run_trial(uint32_t m, uint32_t n, uint32_t k, uint64_t seed, cp_method method,
                       const cp_trial_config* cfg, cp_trial_record* out) {
  if (cp_status s = require(cfg && out, "cp_run_trial: null argument"); s != CP_OK) return s;
  return guarded([&] {
    const TrialRecord rec =
        run_trial(m, n, k, seed, method == CP_METHOD_AM ? Method::am : Method::block_l1,
                  to_core(*cfg));
    std::memset(out, 0, sizeof(*out));
    out->success = rec.success ? 1 : 0;
    out->rel_err_x = rec.rel_err_x;
    out->rel_err_h = rec.rel_err_h;
    out->iterations = rec.iterations;
    std::snprintf(out->status, sizeof(out->status), "%s", rec.status.c_str());
    out->ms = rec.ms;
    out->objective = rec.objective;
    out->feasibility_gap = rec.feasibility_gap;
    out->spectral_ratio = rec.spectral_ratio;
    return CP_OK;
  });
}

cp_status cp_run_baselines(uint32_t m, uint32_t n, uint32_t k, uint64_t seed,
                           const char* bpdn_trace_path, cp_baseline_report* out) {
  if (cp_status s = require(out != nullptr, "cp_run_baselines: null out"); s != CP_OK) return s;
  return guarded([&] {
    const BaselineReport rep =
        run_baselines(m, n, k, seed, bpdn_trace_path ? bpdn_trace_path : "");
    out->ls_rank_ok = rep.ls_rank_ok ? 1 : 0;
    out->ls_rel_err = rep.ls_rel_err;
    out->bpdn_ok = rep.bpdn_ok ? 1 : 0;
    out->bpdn_support_exact = rep.bpdn_support_exact ? 1 : 0;
    out->bpdn_rel_err = rep.bpdn_rel_err;
    return CP_OK;
  });
}

}  // extern "C"

namespace {

PhaseGridSpec to_core(const cp_phase_spec& s) {
  PhaseGridSpec spec;
  spec.m = s.m;
  spec.n_values.assign(s.n_values, s.n_values + s.n_count);
  spec.k_values.assign(s.k_values, s.k_values + s.k_count);
  spec.trials = s.trials;
  spec.base_seed = s.base_seed;
  spec.success_tol = s.success_tol;
  return spec;
}

}  // namespace

extern "C" {

cp_status cp_phase_diagram_run(const cp_phase_spec* spec, cp_method method,
                               const cp_trial_config* cfg, uint32_t jobs,
                               cp_phase_diagram** out) {
  if (cp_status s = require(spec && cfg && out, "cp_phase_diagram_run: null argument");
      s != CP_OK)
    return s;
  if (cp_status s = require(spec->n_values && spec->k_values && spec->n_count && spec->k_count,
                            "cp_phase_diagram_run: empty grid");
      s != CP_OK)
    return s;
  return guarded([&] {
    *out = new cp_phase_diagram{run_phase_diagram(
        to_core(*spec), method == CP_METHOD_AM ? Method::am : Method::block_l1, to_core(*cfg),
        jobs ? jobs : 1)};
    return CP_OK;
  });
}

size_t cp_phase_diagram_n_count(const cp_phase_diagram* d) {
  return d ? d->rep.spec.n_values.size() : 0;
}
size_t cp_phase_diagram_k_count(const cp_phase_diagram* d) {
  return d ? d->rep.spec.k_values.size() : 0;
}

cp_status cp_phase_diagram_cell(const cp_phase_diagram* d, size_t n_idx, size_t k_idx,
                                cp_phase_cell* out) {
  if (cp_status s = require(d && out, "cp_phase_diagram_cell: null argument"); s != CP_OK)
    return s;
  if (n_idx >= d->rep.spec.n_values.size() || k_idx >= d->rep.spec.k_values.size())
    return fail(CP_ERR_INVALID_ARG, "cp_phase_diagram_cell: index out of range");
  const PhaseCell& c = d->rep.cell(n_idx, k_idx);
  out->n = static_cast<uint32_t>(c.n);
  out->k = static_cast<uint32_t>(c.k);
  out->successes = static_cast<uint32_t>(c.successes);
  out->trials = static_cast<uint32_t>(d->rep.spec.trials);
  out->rate = d->rep.rate(c);
  out->mean_iterations = c.mean_iterations;
  out->mean_ms = c.mean_ms;
  return CP_OK;
}

cp_status cp_phase_diagram_write_csv(const cp_phase_diagram* d, const char* path) {
  if (cp_status s = require(d && path, "cp_phase_diagram_write_csv: null argument"); s != CP_OK)
    return s;
  return guarded([&] {
    write_diagram_csv(d->rep, path);
    return CP_OK;
  });
}

cp_status cp_phase_diagram_read_csv(const char* path, cp_phase_diagram** out) {
  if (cp_status s = require(path && out, "cp_phase_diagram_read_csv: null argument"); s != CP_OK)
    return s;
  return guarded([&] {
    *out = new cp_phase_diagram{read_diagram_csv(path)};
    return CP_OK;
  });
}

cp_status cp_phase_diagram_write_timing_csv(const cp_phase_diagram* d, const char* path) {
  if (cp_status s = require(d && path, "cp_phase_diagram_write_timing_csv: null argument");
      s != CP_OK)
    return s;
  return guarded([&] {
    write_diagram_timing_csv(d->rep, path);
    return CP_OK;
  });
}

cp_status cp_phase_diagram_render_pgm(const cp_phase_diagram* d, const char* path) {
  if (cp_status s = require(d && path, "cp_phase_diagram_render_pgm: null argument"); s != CP_OK)
    return s;
  return guarded([&] {
    render_pgm(d->rep, path);
    return CP_OK;
  });
}

cp_status cp_write_vector(const char* path, const double* v, size_t len) {
  if (cp_status s = require(path && v, "cp_write_vector: null argument"); s != CP_OK) return s;
  return guarded([&] {
    write_vector_scp1(path, Vec(v, v + len));
    return CP_OK;
  });
}

cp_status cp_read_vector(const char* path, double** out, size_t* len) {
  if (cp_status s = require(path && out && len, "cp_read_vector: null argument"); s != CP_OK)
    return s;
  return guarded([&] {
    const Vec v = read_vector_scp1(path);
    auto* buf = static_cast<double*>(std::malloc(v.size() * sizeof(double)));
    if (!buf) return fail(CP_ERR_INTERNAL, "cp_read_vector: allocation failed");
    std::memcpy(buf, v.data(), v.size() * sizeof(double));
    *out = buf;
    *len = v.size();
    return CP_OK;
  });
}

cp_status cp_matrix_write(const cp_matrix* a, const char* path) {
  if (cp_status s = require(a && path, "cp_matrix_write: null argument"); s != CP_OK) return s;
  return guarded([&] {
    write_matrix_scp1(path, a->rep.a);
    return CP_OK;
  });
}

cp_status cp_matrix_read(const char* path, cp_matrix** out) {
  if (cp_status s = require(path && out, "cp_matrix_read: null argument"); s != CP_OK) return s;
  return guarded([&] {
    Matrix m = read_matrix_scp1(path);
    if (m.rows() <= m.cols())
      throw DimensionError("cp_matrix_read: stored matrix is not a coding matrix (rows <= cols)");
    CodingMatrix cm;
    cm.m = m.rows();
    cm.n = m.cols();
    cm.a = std::move(m);
    cm.seed = 0;  // unknown for deserialized matrices
    *out = new cp_matrix{std::move(cm)};
    return CP_OK;
  });
}

cp_status cp_channel_write_csv(const cp_channel* h, const char* path) {
  if (cp_status s = require(h && path, "cp_channel_write_csv: null argument"); s != CP_OK)
    return s;
  return guarded([&] {
    write_channel_csv(path, h->rep);
    return CP_OK;
  });
}

cp_status cp_channel_read_csv(const char* path, cp_channel** out) {
  if (cp_status s = require(path && out, "cp_channel_read_csv: null argument"); s != CP_OK)
    return s;
  return guarded([&] {
    *out = new cp_channel{read_channel_csv(path)};
    return CP_OK;
  });
}

}  // extern "C"
