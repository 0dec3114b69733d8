#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include "rng.hpp"

namespace chanprot {

namespace {

struct Instance {
  Vec x;
  CodingMatrix a;
  Channel h;
  Vec y;
};

Instance make_instance(std::size_t m, std::size_t n, std::size_t k, std::uint64_t seed,
                       double noise_sigma) {
  Instance inst;
  inst.x = Rng(mix_seed(seed, kSeedSignal)).gaussian_vec(n);
  inst.a = generate_coding_matrix(m, n, mix_seed(seed, kSeedMatrix));
  inst.h = generate_channel(m, k, mix_seed(seed, kSeedChannel));
  inst.y = apply_channel(encode(inst.a, inst.x), inst.h, noise_sigma,
                         mix_seed(seed, kSeedNoise))
               .y;
  return inst;
}

std::size_t strongest_tap_delay(const Channel& h) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < h.taps.size(); ++i)
    if (std::abs(h.taps[i]) > std::abs(h.taps[best])) best = i;
  return h.support[best];
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Method method_from_string(const std::string& s) {
  if (s == "am") return Method::am;
  if (s == "block-l1") return Method::block_l1;
  throw IoError("unknown method: " + s + " (expected am or block-l1)");
}

const char* to_string(Method m) { return m == Method::am ? "am" : "block-l1"; }

TrialRecord run_trial(std::size_t m, std::size_t n, std::size_t k, std::uint64_t seed,
                      Method method, const TrialConfig& cfg) {
  TrialRecord rec;
  rec.m = m;
  rec.n = n;
  rec.k = k;
  rec.seed = seed;
  rec.method = method;

  const Instance inst = make_instance(m, n, k, seed, cfg.noise_sigma);
  const double t0 = now_ms();

  double rel_x = std::numeric_limits<double>::infinity();
  double rel_h = std::numeric_limits<double>::infinity();

  if (method == Method::am) {
    AmConfig am = cfg.am;
    if (am.k_max == 0) am.k_max = std::max<std::size_t>(1, m / 4);
    if (am.max_iters == 0) am.max_iters = am.r * am.k_max;
    if (cfg.known_strongest_path)
      am.init_delay = static_cast<long long>(strongest_tap_delay(inst.h));
    const RecoveryResult res = recover(inst.a, inst.y, am);
    rec.iterations = res.iterations;
    rec.status = to_string(res.status);
    if (norm2(res.x_hat) > 0.0) {
      const Alignment al = align_scale(res.x_hat, inst.x);
      rel_x = al.rel_err;
      if (!res.h_hat.support.empty()) rel_h = channel_rel_err(res.h_hat, inst.h, al.alpha);
    }
  } else {
    const BlockOperator op(inst.a);
    BlockConfig blk = cfg.block;
    blk.m_cap = std::max(blk.m_cap, m);  // the harness sized the instance deliberately
    const BlockSolution sol = solve_block_l1(op, inst.y, blk);
    rec.iterations = sol.iterations;
    rec.status = sol.status == BlockStatus::converged ? "converged" : "iteration-cap";
    rec.objective = sol.objective;
    rec.feasibility_gap = sol.feasibility_gap;
    rec.spectral_ratio = sol.spectral_ratio;
    if (norm2(sol.x_hat) > 0.0) {
      const Alignment al = align_scale(sol.x_hat, inst.x);
      rel_x = al.rel_err;
      if (!sol.h_hat.support.empty()) rel_h = channel_rel_err(sol.h_hat, inst.h, al.alpha);
    }
  }

  rec.ms = now_ms() - t0;
  rec.rel_err_x = rel_x;
  rec.rel_err_h = rel_h;
  const bool judged = cfg.noise_sigma == 0.0 || cfg.judge_noisy;
  rec.success = judged && rel_x <= cfg.success_tol && rel_h <= cfg.success_tol;
  return rec;
}

const PhaseCell& PhaseDiagram::cell(std::size_t n_idx, std::size_t k_idx) const {
  return cells[n_idx * spec.k_values.size() + k_idx];
}

PhaseDiagram run_phase_diagram(const PhaseGridSpec& spec, Method method,
                               const TrialConfig& cfg, std::size_t jobs) {
  if (spec.trials < 1) throw DimensionError("run_phase_diagram: trials >= 1 required");
  for (std::size_t n : spec.n_values)
    if (n >= spec.m) throw DimensionError("run_phase_diagram: all n must be < m");
  for (std::size_t k : spec.k_values)
    if (k > spec.m) throw DimensionError("run_phase_diagram: all k must be <= m");

  struct Job {
    std::size_t cell;
    std::size_t n, k;
    std::uint64_t seed;
  };
  std::vector<Job> work;
  for (std::size_t ni = 0; ni < spec.n_values.size(); ++ni) {
    for (std::size_t ki = 0; ki < spec.k_values.size(); ++ki) {
      const std::size_t cell = ni * spec.k_values.size() + ki;
      for (std::size_t t = 0; t < spec.trials; ++t) {
        const std::uint64_t seed =
            mix_seed(mix_seed(mix_seed(spec.base_seed, spec.n_values[ni]), spec.k_values[ki]), t);
        work.push_back({cell, spec.n_values[ni], spec.k_values[ki], seed});
      }
    }
  }

  TrialConfig tc = cfg;
  tc.success_tol = spec.success_tol;

  std::vector<TrialRecord> records(work.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < work.size(); ++i)
      records[i] = run_trial(spec.m, work[i].n, work[i].k, work[i].seed, method, tc);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= work.size()) return;
        records[i] = run_trial(spec.m, work[i].n, work[i].k, work[i].seed, method, tc);
      }
    };
    std::vector<std::future<void>> pool;
    for (std::size_t j = 0; j < jobs; ++j)
      pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();
  }

  PhaseDiagram d;
  d.spec = spec;
  d.cells.resize(spec.n_values.size() * spec.k_values.size());
  for (std::size_t ni = 0; ni < spec.n_values.size(); ++ni)
    for (std::size_t ki = 0; ki < spec.k_values.size(); ++ki) {
      auto& c = d.cells[ni * spec.k_values.size() + ki];
      c.n = spec.n_values[ni];
      c.k = spec.k_values[ki];
    }
  for (std::size_t i = 0; i < work.size(); ++i) {
    auto& c = d.cells[work[i].cell];
    c.successes += records[i].success ? 1 : 0;
    c.mean_iterations += static_cast<double>(records[i].iterations);
    c.mean_ms += records[i].ms;
  }
  for (auto& c : d.cells) {
    c.mean_iterations /= static_cast<double>(spec.trials);
    c.mean_ms /= static_cast<double>(spec.trials);
  }
  return d;
}

void write_diagram_csv(const PhaseDiagram& d, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError(path + ": cannot open for writing");
  os << "m,n,k,trials,successes,rate,mean_iterations\n";
  for (const auto& c : d.cells) {
    os << d.spec.m << "," << c.n << "," << c.k << "," << d.spec.trials << ","
       << c.successes << "," << format_double(d.rate(c)) << ","
       << format_double(c.mean_iterations) << "\n";
  }
  if (!os) throw IoError(path + ": write failed");
}

PhaseDiagram read_diagram_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError(path + ": cannot open for reading");
  std::string line;
  if (!std::getline(is, line) || line != "m,n,k,trials,successes,rate,mean_iterations")
    throw IoError(path + ": bad diagram header");

  PhaseDiagram d;
  d.spec.n_values.clear();
  d.spec.k_values.clear();
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    PhaseCell c;
    std::size_t m = 0, trials = 0;
    double rate = 0.0;
    if (std::sscanf(line.c_str(), "%zu,%zu,%zu,%zu,%zu,%lf,%lf", &m, &c.n, &c.k, &trials,
                    &c.successes, &rate, &c.mean_iterations) != 7)
      throw IoError(path + ": bad diagram row: " + line);
    if (first) {
      d.spec.m = m;
      d.spec.trials = trials;
      first = false;
    } else if (m != d.spec.m || trials != d.spec.trials) {
      throw IoError(path + ": inconsistent m/trials across rows");
    }
    if (std::find(d.spec.n_values.begin(), d.spec.n_values.end(), c.n) == d.spec.n_values.end())
      d.spec.n_values.push_back(c.n);
    if (std::find(d.spec.k_values.begin(), d.spec.k_values.end(), c.k) == d.spec.k_values.end())
      d.spec.k_values.push_back(c.k);
    d.cells.push_back(c);
  }
  if (d.cells.size() != d.spec.n_values.size() * d.spec.k_values.size())
    throw IoError(path + ": incomplete grid");
  return d;
}

void write_diagram_timing_csv(const PhaseDiagram& d, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError(path + ": cannot open for writing");
  os << "m,n,k,mean_ms\n";
  for (const auto& c : d.cells)
    os << d.spec.m << "," << c.n << "," << c.k << "," << format_double(c.mean_ms) << "\n";
  if (!os) throw IoError(path + ": write failed");
}

std::string contour_path_for(const std::string& pgm_path) {
  const auto dotpos = pgm_path.rfind(".pgm");
  if (dotpos != std::string::npos && dotpos == pgm_path.size() - 4)
    return pgm_path.substr(0, dotpos) + ".contour.csv";
  return pgm_path + ".contour.csv";
}

void render_pgm(const PhaseDiagram& d, const std::string& pgm_path) {
  const std::size_t w = d.spec.n_values.size();
  const std::size_t h = d.spec.k_values.size();
  if (d.cells.size() != w * h) throw IoError("render_pgm: incomplete grid");

  Pgm img{w, h, std::vector<std::uint8_t>(w * h)};
  for (std::size_t ki = 0; ki < h; ++ki)
    for (std::size_t ni = 0; ni < w; ++ni) {
      const double rate = d.rate(d.cell(ni, ki));
      img.pixels[ki * w + ni] = static_cast<std::uint8_t>(std::floor(255.0 * rate + 0.5));
    }
  write_pgm(pgm_path, img);

  // 95% iso-rate boundary: passing cells with a failing 4-neighbor
  std::ofstream os(contour_path_for(pgm_path));
  if (!os) throw IoError(contour_path_for(pgm_path) + ": cannot open for writing");
  os << "n,k,rate\n";
  auto rate_at = [&](std::size_t ni, std::size_t ki) { return d.rate(d.cell(ni, ki)); };
  for (std::size_t ki = 0; ki < h; ++ki)
    for (std::size_t ni = 0; ni < w; ++ni) {
      if (rate_at(ni, ki) < 0.95) continue;
      const bool boundary = (ni > 0 && rate_at(ni - 1, ki) < 0.95) ||
                            (ni + 1 < w && rate_at(ni + 1, ki) < 0.95) ||
                            (ki > 0 && rate_at(ni, ki - 1) < 0.95) ||
                            (ki + 1 < h && rate_at(ni, ki + 1) < 0.95);
      if (boundary)
        os << d.spec.n_values[ni] << "," << d.spec.k_values[ki] << ","
           << format_double(rate_at(ni, ki)) << "\n";
    }
  if (!os) throw IoError(contour_path_for(pgm_path) + ": write failed");
}

BaselineReport run_baselines(std::size_t m, std::size_t n, std::size_t k,
                             std::uint64_t seed, const std::string& bpdn_trace_csv) {
  BaselineReport rep;
  rep.m = m;
  rep.n = n;
  rep.k = k;
  rep.seed = seed;

  const Instance inst = make_instance(m, n, k, seed, 0.0);

  // (a) channel known: plain least squares for x
  try {
    const Vec x_hat = signal_update(inst.a, inst.h, inst.y);
    Vec diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = x_hat[i] - inst.x[i];
    rep.ls_rel_err = norm2(diff) / norm2(inst.x);
    rep.ls_rank_ok = true;
  } catch (const RankDeficiencyError&) {
    rep.ls_rank_ok = false;
    rep.ls_rel_err = std::numeric_limits<double>::infinity();
  }

  // (b) signal known: homotopy BPDN for h, refit on the found support
  try {
    const CirculantOperator c(encode(inst.a, inst.x));
    PathTrace trace;
    const HomotopyResult res =
        solve_to_cardinality(c, inst.y, k, -1.0, bpdn_trace_csv.empty() ? nullptr : &trace);
    if (!bpdn_trace_csv.empty()) write_path_trace_csv(trace, bpdn_trace_csv);
    Channel h_hat;
    h_hat.m = m;
    h_hat.support = res.support;
    h_hat.taps = res.support.empty() ? Vec{} : refit_on_support(c, inst.y, res.support);
    rep.bpdn_ok = true;
    rep.bpdn_support_exact = h_hat.support == inst.h.support;
    Vec dh = dense(h_hat), dt = dense(inst.h);
    Vec diff(m);
    for (std::size_t i = 0; i < m; ++i) diff[i] = dh[i] - dt[i];
    rep.bpdn_rel_err = norm2(diff) / norm2(dt);
  } catch (const DegeneratePathError&) {
    rep.bpdn_ok = false;
    rep.bpdn_rel_err = std::numeric_limits<double>::infinity();
  }
  return rep;
}

}  // namespace chanprot
