// chanprot command-line harness. Everything goes through the public C API.

#include <algorithm>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chanprot/chanprot.h"

namespace {

struct VecBuf {
  double* data = nullptr;
  size_t len = 0;
  ~VecBuf() { cp_free(data); }
};

int die(cp_status s, const std::string& where) {
  std::fprintf(stderr, "error: %s: %s (%s)\n", where.c_str(), cp_last_error(),
               cp_status_str(s));
  return 1;
}

#define CHECKED(expr)                                     \
  do {                                                    \
    if (cp_status s_ = (expr); s_ != CP_OK) return die(s_, #expr); \
  } while (0)

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// <x_hat, x_true> / ||x_hat||^2 and the aligned relative error
bool aligned_error(const std::vector<double>& x_hat, const std::vector<double>& x_true,
                   double& alpha, double& rel_err) {
  double hh = 0.0, ht = 0.0, tt = 0.0;
  for (size_t i = 0; i < x_hat.size(); ++i) {
    hh += x_hat[i] * x_hat[i];
    ht += x_hat[i] * x_true[i];
    tt += x_true[i] * x_true[i];
  }
  if (hh == 0.0 || tt == 0.0) return false;
  alpha = ht / hh;
  double d2 = 0.0;
  for (size_t i = 0; i < x_hat.size(); ++i) {
    const double d = alpha * x_hat[i] - x_true[i];
    d2 += d * d;
  }
  rel_err = std::sqrt(d2 / tt);
  return true;
}

struct MatrixArgs {
  std::string matrix_path;
  uint32_t m = 0, n = 0;
  uint64_t seed = 0;
};

// Either --matrix FILE or the (--m, --n, --seed) triple regenerates A.
int load_matrix(const MatrixArgs& args, cp_matrix** out) {
  if (!args.matrix_path.empty()) {
    CHECKED(cp_matrix_read(args.matrix_path.c_str(), out));
    return 0;
  }
  if (args.m == 0 || args.n == 0) {
    std::fprintf(stderr, "error: need --matrix or --m/--n/--seed to define A\n");
    return 1;
  }
  CHECKED(cp_coding_matrix_generate(args.m, args.n, cp_mix_seed(args.seed, 2), out));
  return 0;
}

void add_am_flags(CLI::App* cmd, cp_am_config* am) {
  cmd->add_option("--r", am->r, "iterations per cardinality level");
  cmd->add_option("--k-max", am->k_max, "cardinality cap (0: m/4)");
  cmd->add_option("--max-iters", am->max_iters, "iteration cap (0: r*k-max)");
  cmd->add_option("--residual-tol", am->residual_tol, "relative residual for convergence");
  cmd->add_option("--init-delay", am->init_delay,
                  "known strongest-path delay (-1: search for it)");
  cmd->add_flag_callback("--no-debias", [am] { am->debias = 0; },
                         "skip the least-squares tap refit");
}

void add_block_flags(CLI::App* cmd, cp_block_config* blk) {
  cmd->add_option("--tol", blk->tol, "primal/dual residual tolerance");
  cmd->add_option("--max-iters", blk->max_iters, "splitting iteration cap");
  cmd->add_option("--rho", blk->rho, "augmented-Lagrangian penalty");
  cmd->add_option("--m-cap", blk->m_cap, "desk-scale guard on m (default 64)");
}

std::vector<uint32_t> to_u32(const std::vector<unsigned long long>& v) {
  return std::vector<uint32_t>(v.begin(), v.end());
}

// Flat key=value configuration: `--config FILE` anywhere on the command line
// loads FILE and turns each `key=value` line into `--key=value`, except for
// keys the user already passed explicitly. Returns the rewritten argv.
bool expand_config(int argc, char** argv, std::vector<std::string>& out) {
  std::string config_path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config") {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "error: --config needs a file argument\n");
        return false;
      }
      config_path = argv[++i];
    } else if (arg.rfind("--config=", 0) == 0) {
      config_path = arg.substr(9);
    } else {
      out.push_back(arg);
    }
  }
  if (config_path.empty()) return true;

  std::ifstream is(config_path);
  if (!is) {
    std::fprintf(stderr, "error: cannot read config file %s\n", config_path.c_str());
    return false;
  }
  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    for (const auto& a : out)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: %s: expected key=value, got: %s\n", config_path.c_str(),
                   line.c_str());
      return false;
    }
    const std::string key = line.substr(0, eq);
    if (key == "config" || given(key)) continue;
    out.push_back("--" + key + "=" + line.substr(eq + 1));
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random-coding protection against sparse convolutive channels"};
  app.name("chanprot");
  app.require_subcommand(1);
  app.footer("Every subcommand accepts --config FILE (flat key=value lines, keys are the\n"
             "long option names without --); explicit flags override config values.");

  // ---- encode ----
  auto* encode = app.add_subcommand("encode", "generate A and transmit a codeword Ax");
  uint32_t enc_m = 256, enc_n = 16;
  uint64_t enc_seed = 1;
  std::string enc_in, enc_out, enc_signal_out, enc_matrix_out;
  encode->add_option("--m", enc_m, "codeword length")->required();
  encode->add_option("--n", enc_n, "signal length")->required();
  encode->add_option("--seed", enc_seed, "instance seed");
  encode->add_option("--in", enc_in, "signal SCP1 (default: draw N(0,1) from the seed)");
  encode->add_option("--out", enc_out, "codeword SCP1")->required();
  encode->add_option("--signal-out", enc_signal_out, "write the signal used");
  encode->add_option("--matrix-out", enc_matrix_out, "write A");

  // ---- simulate ----
  auto* simulate = app.add_subcommand("simulate", "pass a codeword through a sparse channel");
  uint32_t sim_k = 2;
  uint64_t sim_seed = 1;
  double sim_noise = 0.0;
  std::string sim_in, sim_out, sim_channel_out;
  simulate->add_option("--k", sim_k, "channel sparsity")->required();
  simulate->add_option("--seed", sim_seed, "instance seed");
  simulate->add_option("--noise-sigma", sim_noise, "additive noise level");
  simulate->add_option("--in", sim_in, "codeword SCP1")->required();
  simulate->add_option("--out", sim_out, "received SCP1")->required();
  simulate->add_option("--channel-out", sim_channel_out, "write the channel (CSV)");

  // ---- recover-am ----
  auto* ram = app.add_subcommand("recover-am", "joint recovery by alternating minimization");
  MatrixArgs ram_mat;
  std::string ram_in, ram_out, ram_channel_out, ram_trace, ram_truth;
  cp_am_config ram_cfg;
  cp_am_config_init(&ram_cfg);
  ram->add_option("--matrix", ram_mat.matrix_path, "coding matrix SCP1");
  ram->add_option("--m", ram_mat.m, "codeword length (with --seed)");
  ram->add_option("--n", ram_mat.n, "signal length (with --seed)");
  ram->add_option("--seed", ram_mat.seed, "instance seed used at encode time");
  ram->add_option("--in", ram_in, "received SCP1")->required();
  ram->add_option("--out", ram_out, "signal estimate SCP1");
  ram->add_option("--channel-out", ram_channel_out, "channel estimate CSV");
  ram->add_option("--trace", ram_trace, "per-iteration trace CSV");
  ram->add_option("--truth", ram_truth, "true signal SCP1 for error reporting");
  add_am_flags(ram, &ram_cfg);

  // ---- recover-block ----
  auto* rbl = app.add_subcommand("recover-block", "joint recovery by the lifted block-l1 program");
  MatrixArgs rbl_mat;
  std::string rbl_in, rbl_out, rbl_channel_out, rbl_summary, rbl_truth;
  cp_block_config rbl_cfg;
  cp_block_config_init(&rbl_cfg);
  rbl->add_option("--matrix", rbl_mat.matrix_path, "coding matrix SCP1");
  rbl->add_option("--m", rbl_mat.m, "codeword length (with --seed)");
  rbl->add_option("--n", rbl_mat.n, "signal length (with --seed)");
  rbl->add_option("--seed", rbl_mat.seed, "instance seed used at encode time");
  rbl->add_option("--in", rbl_in, "received SCP1")->required();
  rbl->add_option("--out", rbl_out, "signal estimate SCP1");
  rbl->add_option("--channel-out", rbl_channel_out, "channel estimate CSV");
  rbl->add_option("--summary-out", rbl_summary, "summary CSV row");
  rbl->add_option("--truth", rbl_truth, "true signal SCP1 for error reporting");
  add_block_flags(rbl, &rbl_cfg);

  // ---- baseline ----
  auto* base = app.add_subcommand("baseline", "known-channel LS and known-signal BPDN");
  uint32_t bas_m = 128, bas_n = 32, bas_k = 4;
  uint64_t bas_seed = 1;
  std::string bas_out, bas_trace;
  base->add_option("--m", bas_m, "codeword length")->required();
  base->add_option("--n", bas_n, "signal length")->required();
  base->add_option("--k", bas_k, "channel sparsity")->required();
  base->add_option("--seed", bas_seed, "instance seed");
  base->add_option("--out", bas_out, "report CSV");
  base->add_option("--homotopy-trace", bas_trace,
                   "dump the BPDN homotopy path (breakpoint,tau,event,column,support_size)");

  // ---- phase-diagram ----
  auto* phase = app.add_subcommand("phase-diagram", "success-rate grid over (n, k)");
  uint32_t ph_m = 128, ph_trials = 0, ph_jobs = 1;
  uint64_t ph_seed = 1;
  double ph_tol = 1e-4, ph_noise = 0.0;
  bool ph_full = false;
  std::string ph_method = "am", ph_out, ph_timing;
  std::vector<unsigned long long> ph_n, ph_k;
  cp_trial_config ph_cfg;
  cp_trial_config_init(&ph_cfg);
  phase->add_option("--m", ph_m, "codeword length");
  phase->add_option("--n-values", ph_n, "signal lengths (default grid per m)")->delimiter(',');
  phase->add_option("--k-values", ph_k, "channel sparsities (default grid per m)")->delimiter(',');
  phase->add_option("--trials", ph_trials, "trials per cell (default grid per m)");
  phase->add_option("--seed", ph_seed, "base seed");
  phase->add_option("--success-tol", ph_tol, "aligned relative error counted as success");
  phase->add_option("--noise-sigma", ph_noise, "additive noise level");
  phase->add_option("--method", ph_method, "am or block-l1")
      ->check(CLI::IsMember({"am", "block-l1"}));
  phase->add_option("--jobs", ph_jobs, "parallel workers (outcome-invariant)");
  phase->add_flag("--full-scale", ph_full, "allow m >= 256 (runtime: hours, not minutes)");
  bool ph_judge_noisy = false;
  phase->add_flag("--judge-noisy", ph_judge_noisy,
                  "apply success-tol to noisy runs too (off: noisy trials are never successes)");
  phase->add_option("--out", ph_out, "output prefix: .csv, .pgm, .contour.csv")->required();
  phase->add_option("--timing-out", ph_timing, "wall-time sidecar CSV (non-deterministic)");
  add_am_flags(phase, &ph_cfg.am);

  // ---- render ----
  auto* render = app.add_subcommand("render", "re-render a diagram CSV as PGM + contour");
  std::string ren_in, ren_out;
  render->add_option("--in", ren_in, "diagram CSV")->required();
  render->add_option("--out", ren_out, "PGM path")->required();

  std::vector<std::string> args;
  if (!expand_config(argc, argv, args)) return 1;
  std::reverse(args.begin(), args.end());  // CLI11's vector overload wants reversed argv
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (encode->parsed()) {
    cp_matrix* a = nullptr;
    CHECKED(cp_coding_matrix_generate(enc_m, enc_n, cp_mix_seed(enc_seed, 2), &a));
    std::unique_ptr<cp_matrix, decltype(&cp_matrix_free)> guard(a, cp_matrix_free);
    std::vector<double> x(enc_n);
    if (enc_in.empty()) {
      CHECKED(cp_gaussian_vector(enc_n, cp_mix_seed(enc_seed, 1), x.data()));
    } else {
      VecBuf buf;
      CHECKED(cp_read_vector(enc_in.c_str(), &buf.data, &buf.len));
      if (buf.len != enc_n) {
        std::fprintf(stderr, "error: %s holds %zu entries, expected n=%u\n", enc_in.c_str(),
                     buf.len, enc_n);
        return 1;
      }
      x.assign(buf.data, buf.data + buf.len);
    }
    std::vector<double> codeword(enc_m);
    CHECKED(cp_encode(a, x.data(), x.size(), codeword.data()));
    CHECKED(cp_write_vector(enc_out.c_str(), codeword.data(), codeword.size()));
    if (!enc_signal_out.empty())
      CHECKED(cp_write_vector(enc_signal_out.c_str(), x.data(), x.size()));
    if (!enc_matrix_out.empty()) CHECKED(cp_matrix_write(a, enc_matrix_out.c_str()));
    std::printf("codeword: m=%u n=%u seed=%" PRIu64 " -> %s\n", enc_m, enc_n, enc_seed,
                enc_out.c_str());
    return 0;
  }

  if (simulate->parsed()) {
    VecBuf codeword;
    CHECKED(cp_read_vector(sim_in.c_str(), &codeword.data, &codeword.len));
    cp_channel* h = nullptr;
    CHECKED(cp_channel_generate(static_cast<uint32_t>(codeword.len), sim_k,
                                cp_mix_seed(sim_seed, 3), &h));
    std::unique_ptr<cp_channel, decltype(&cp_channel_free)> guard(h, cp_channel_free);
    std::vector<double> y(codeword.len);
    CHECKED(cp_channel_apply(h, codeword.data, codeword.len, sim_noise,
                             cp_mix_seed(sim_seed, 4), y.data()));
    CHECKED(cp_write_vector(sim_out.c_str(), y.data(), y.size()));
    if (!sim_channel_out.empty()) CHECKED(cp_channel_write_csv(h, sim_channel_out.c_str()));
    std::printf("received: m=%zu k=%u noise-sigma=%s -> %s\n", codeword.len, sim_k,
                fmt(sim_noise).c_str(), sim_out.c_str());
    return 0;
  }

  if (ram->parsed()) {
    cp_matrix* a = nullptr;
    if (int rc = load_matrix(ram_mat, &a)) return rc;
    std::unique_ptr<cp_matrix, decltype(&cp_matrix_free)> guard(a, cp_matrix_free);
    VecBuf y;
    CHECKED(cp_read_vector(ram_in.c_str(), &y.data, &y.len));
    cp_am_result* res = nullptr;
    CHECKED(cp_recover_am(a, y.data, y.len, &ram_cfg, &res));
    std::unique_ptr<cp_am_result, decltype(&cp_am_result_free)> rguard(res, cp_am_result_free);

    const cp_am_status st = cp_am_result_status(res);
    std::printf("status=%s iterations=%" PRIu64 " residual_rel=%s\n", cp_am_status_str(st),
                cp_am_result_iterations(res), fmt(cp_am_result_residual_rel(res)).c_str());

    std::vector<double> x_hat(cp_matrix_cols(a));
    CHECKED(cp_am_result_signal(res, x_hat.data()));
    if (!ram_out.empty()) CHECKED(cp_write_vector(ram_out.c_str(), x_hat.data(), x_hat.size()));
    if (!ram_channel_out.empty()) {
      cp_channel* h = nullptr;
      if (cp_am_result_channel(res, &h) == CP_OK) {
        CHECKED(cp_channel_write_csv(h, ram_channel_out.c_str()));
        cp_channel_free(h);
      } else {
        std::fprintf(stderr, "note: no channel estimate to write (%s)\n", cp_last_error());
      }
    }
    if (!ram_trace.empty()) CHECKED(cp_am_result_write_trace_csv(res, ram_trace.c_str()));
    if (!ram_truth.empty()) {
      VecBuf truth;
      CHECKED(cp_read_vector(ram_truth.c_str(), &truth.data, &truth.len));
      double alpha = 0.0, rel = 0.0;
      if (truth.len == x_hat.size() &&
          aligned_error(x_hat, std::vector<double>(truth.data, truth.data + truth.len), alpha,
                        rel))
        std::printf("aligned: alpha=%s rel_err=%s\n", fmt(alpha).c_str(), fmt(rel).c_str());
      else
        std::fprintf(stderr, "note: cannot align against %s\n", ram_truth.c_str());
    }
    return 0;
  }

  if (rbl->parsed()) {
    cp_matrix* a = nullptr;
    if (int rc = load_matrix(rbl_mat, &a)) return rc;
    std::unique_ptr<cp_matrix, decltype(&cp_matrix_free)> guard(a, cp_matrix_free);
    VecBuf y;
    CHECKED(cp_read_vector(rbl_in.c_str(), &y.data, &y.len));
    cp_block_result* res = nullptr;
    CHECKED(cp_recover_block(a, y.data, y.len, &rbl_cfg, &res));
    std::unique_ptr<cp_block_result, decltype(&cp_block_result_free)> rguard(
        res, cp_block_result_free);

    const double obj = cp_block_result_objective(res);
    const double gap = cp_block_result_feasibility_gap(res);
    const double ratio = cp_block_result_spectral_ratio(res);
    std::printf("status=%s iterations=%" PRIu64 " objective=%s feasibility_gap=%s "
                "spectral_ratio=%s\n",
                cp_block_result_converged(res) ? "converged" : "iteration-cap",
                cp_block_result_iterations(res), fmt(obj).c_str(), fmt(gap).c_str(),
                fmt(ratio).c_str());

    std::vector<double> x_hat(cp_matrix_cols(a));
    CHECKED(cp_block_result_signal(res, x_hat.data()));
    if (!rbl_out.empty()) CHECKED(cp_write_vector(rbl_out.c_str(), x_hat.data(), x_hat.size()));
    if (!rbl_channel_out.empty()) {
      cp_channel* h = nullptr;
      if (cp_block_result_channel(res, &h) == CP_OK) {
        CHECKED(cp_channel_write_csv(h, rbl_channel_out.c_str()));
        cp_channel_free(h);
      } else {
        std::fprintf(stderr, "note: no channel estimate to write (%s)\n", cp_last_error());
      }
    }
    std::string rel_field;
    if (!rbl_truth.empty()) {
      VecBuf truth;
      CHECKED(cp_read_vector(rbl_truth.c_str(), &truth.data, &truth.len));
      double alpha = 0.0, rel = 0.0;
      if (truth.len == x_hat.size() &&
          aligned_error(x_hat, std::vector<double>(truth.data, truth.data + truth.len), alpha,
                        rel)) {
        std::printf("aligned: alpha=%s rel_err=%s\n", fmt(alpha).c_str(), fmt(rel).c_str());
        rel_field = fmt(rel);
      }
    }
    if (!rbl_summary.empty()) {
      std::FILE* f = std::fopen(rbl_summary.c_str(), "w");
      if (!f) {
        std::fprintf(stderr, "error: cannot write %s\n", rbl_summary.c_str());
        return 1;
      }
      std::fprintf(f, "objective,feasibility_gap,spectral_ratio,rel_err\n%s,%s,%s,%s\n",
                   fmt(obj).c_str(), fmt(gap).c_str(), fmt(ratio).c_str(), rel_field.c_str());
      std::fclose(f);
    }
    return 0;
  }

  if (base->parsed()) {
    cp_baseline_report rep;
    CHECKED(cp_run_baselines(bas_m, bas_n, bas_k, bas_seed,
                             bas_trace.empty() ? nullptr : bas_trace.c_str(), &rep));
    std::printf("known-channel LS: rank_ok=%d rel_err=%s\n", rep.ls_rank_ok,
                fmt(rep.ls_rel_err).c_str());
    std::printf("known-signal BPDN: ok=%d support_exact=%d rel_err=%s\n", rep.bpdn_ok,
                rep.bpdn_support_exact, fmt(rep.bpdn_rel_err).c_str());
    if (!bas_out.empty()) {
      std::FILE* f = std::fopen(bas_out.c_str(), "w");
      if (!f) {
        std::fprintf(stderr, "error: cannot write %s\n", bas_out.c_str());
        return 1;
      }
      std::fprintf(f,
                   "m,n,k,seed,ls_rank_ok,ls_rel_err,bpdn_ok,bpdn_support_exact,bpdn_rel_err\n"
                   "%u,%u,%u,%" PRIu64 ",%d,%s,%d,%d,%s\n",
                   bas_m, bas_n, bas_k, bas_seed, rep.ls_rank_ok, fmt(rep.ls_rel_err).c_str(),
                   rep.bpdn_ok, rep.bpdn_support_exact, fmt(rep.bpdn_rel_err).c_str());
      std::fclose(f);
    }
    return 0;
  }

  if (phase->parsed()) {
    if (ph_m >= 256 && !ph_full) {
      std::fprintf(stderr,
                   "error: m=%u is a full-scale run (hours); pass --full-scale to confirm\n",
                   ph_m);
      return 1;
    }
    // stock grids; anything explicit wins
    std::vector<uint32_t> nv = to_u32(ph_n), kv = to_u32(ph_k);
    uint32_t trials = ph_trials;
    if (nv.empty()) {
      if (ph_m >= 512) nv = {4, 8, 16, 32, 64, 96, 128, 192, 256, 320};
      else if (ph_m >= 256) nv = {4, 8, 16, 32, 48, 64, 96, 128};
      else {
        for (uint32_t n : {4u, 8u, 16u, 32u, 64u})
          if (n < ph_m) nv.push_back(n);
      }
    }
    if (kv.empty()) {
      if (ph_m >= 512) kv = {1, 2, 4, 8, 16, 32, 48, 64, 96, 128};
      else if (ph_m >= 256) kv = {1, 2, 4, 8, 16, 24, 32, 48};
      else {
        for (uint32_t k : {1u, 2u, 4u, 8u, 16u})
          if (k <= ph_m) kv.push_back(k);
      }
    }
    if (trials == 0) trials = ph_m >= 256 ? 10 : 5;

    ph_cfg.success_tol = ph_tol;
    ph_cfg.noise_sigma = ph_noise;
    ph_cfg.judge_noisy = ph_judge_noisy ? 1 : 0;
    cp_phase_spec spec{ph_m, nv.data(), nv.size(), kv.data(), kv.size(), trials, ph_seed,
                       ph_tol};
    cp_phase_diagram* d = nullptr;
    CHECKED(cp_phase_diagram_run(&spec,
                                 ph_method == "am" ? CP_METHOD_AM : CP_METHOD_BLOCK_L1,
                                 &ph_cfg, ph_jobs, &d));
    std::unique_ptr<cp_phase_diagram, decltype(&cp_phase_diagram_free)> guard(
        d, cp_phase_diagram_free);
    CHECKED(cp_phase_diagram_write_csv(d, (ph_out + ".csv").c_str()));
    CHECKED(cp_phase_diagram_render_pgm(d, (ph_out + ".pgm").c_str()));
    if (!ph_timing.empty()) CHECKED(cp_phase_diagram_write_timing_csv(d, ph_timing.c_str()));
    std::printf("phase diagram: %zu x %zu cells, %u trials each -> %s.{csv,pgm}\n",
                cp_phase_diagram_n_count(d), cp_phase_diagram_k_count(d), trials,
                ph_out.c_str());
    return 0;
  }

  if (render->parsed()) {
    cp_phase_diagram* d = nullptr;
    CHECKED(cp_phase_diagram_read_csv(ren_in.c_str(), &d));
    std::unique_ptr<cp_phase_diagram, decltype(&cp_phase_diagram_free)> guard(
        d, cp_phase_diagram_free);
    CHECKED(cp_phase_diagram_render_pgm(d, ren_out.c_str()));
    std::printf("rendered %s -> %s\n", ren_in.c_str(), ren_out.c_str());
    return 0;
  }

  return 0;
}
