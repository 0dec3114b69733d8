// Exercises the shared-library surface the way an external C client would.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "chanprot/chanprot.h"
#include "doctest.h"

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("chanprot_capi_" + name)).string();
}

}  // namespace

TEST_CASE("capi: status strings and argument validation") {
  CHECK(std::strcmp(cp_status_str(CP_OK), "ok") == 0);
  CHECK(cp_gaussian_vector(0, 1, nullptr) == CP_ERR_INVALID_ARG);
  CHECK(std::string(cp_last_error()).find("cp_gaussian_vector") != std::string::npos);

  cp_matrix* a = nullptr;
  CHECK(cp_coding_matrix_generate(4, 8, 1, &a) == CP_ERR_DIMENSION);
}

TEST_CASE("capi: matrix, encode, channel, apply") {
  cp_matrix* a = nullptr;
  REQUIRE(cp_coding_matrix_generate(32, 4, 7, &a) == CP_OK);
  CHECK(cp_matrix_rows(a) == 32);
  CHECK(cp_matrix_cols(a) == 4);

  std::vector<double> x(4);
  REQUIRE(cp_gaussian_vector(4, cp_mix_seed(7, 1), x.data()) == CP_OK);
  std::vector<double> codeword(32);
  REQUIRE(cp_encode(a, x.data(), 4, codeword.data()) == CP_OK);

  // encode of a wrong-length signal reports a dimension error
  CHECK(cp_encode(a, x.data(), 3, codeword.data()) == CP_ERR_DIMENSION);

  cp_channel* h = nullptr;
  REQUIRE(cp_channel_generate(32, 3, 9, &h) == CP_OK);
  CHECK(cp_channel_len(h) == 32);
  CHECK(cp_channel_sparsity(h) == 3);

  std::vector<uint32_t> support(3);
  std::vector<double> taps(3);
  REQUIRE(cp_channel_support(h, support.data()) == CP_OK);
  REQUIRE(cp_channel_taps(h, taps.data()) == CP_OK);
  std::vector<double> dense(32);
  REQUIRE(cp_channel_dense(h, dense.data()) == CP_OK);
  for (int i = 0; i < 3; ++i) CHECK(dense[support[i]] == taps[i]);

  std::vector<double> y(32);
  REQUIRE(cp_channel_apply(h, codeword.data(), 32, 0.0, 0, y.data()) == CP_OK);

  // rebuild the channel from parts and reapply: identical output
  cp_channel* h2 = nullptr;
  REQUIRE(cp_channel_from_parts(32, 3, support.data(), taps.data(), &h2) == CP_OK);
  std::vector<double> y2(32);
  REQUIRE(cp_channel_apply(h2, codeword.data(), 32, 0.0, 0, y2.data()) == CP_OK);
  CHECK(y == y2);

  cp_channel_free(h2);
  cp_channel_free(h);
  cp_matrix_free(a);
}

TEST_CASE("capi: AM recovery on an easy instance") {
  cp_matrix* a = nullptr;
  REQUIRE(cp_coding_matrix_generate(64, 8, 21, &a) == CP_OK);
  std::vector<double> x(8);
  REQUIRE(cp_gaussian_vector(8, 22, x.data()) == CP_OK);
  std::vector<double> codeword(64);
  REQUIRE(cp_encode(a, x.data(), 8, codeword.data()) == CP_OK);
  cp_channel* h = nullptr;
  REQUIRE(cp_channel_generate(64, 1, 23, &h) == CP_OK);
  std::vector<double> y(64);
  REQUIRE(cp_channel_apply(h, codeword.data(), 64, 0.0, 0, y.data()) == CP_OK);

  cp_am_config cfg;
  cp_am_config_init(&cfg);
  cp_am_result* res = nullptr;
  REQUIRE(cp_recover_am(a, y.data(), 64, &cfg, &res) == CP_OK);
  CHECK(cp_am_result_status(res) == CP_AM_CONVERGED);
  CHECK(cp_am_result_residual_rel(res) <= 1e-6);

  std::vector<double> x_hat(8);
  REQUIRE(cp_am_result_signal(res, x_hat.data()) == CP_OK);
  double hh = 0.0;
  for (double v : x_hat) hh += v * v;
  CHECK(std::sqrt(hh) == doctest::Approx(1.0).epsilon(1e-10));

  cp_channel* h_hat = nullptr;
  REQUIRE(cp_am_result_channel(res, &h_hat) == CP_OK);
  uint32_t sup_true = 0, sup_hat = 0;
  REQUIRE(cp_channel_support(h, &sup_true) == CP_OK);
  REQUIRE(cp_channel_support(h_hat, &sup_hat) == CP_OK);
  CHECK(cp_channel_sparsity(h_hat) == 1);
  CHECK(sup_hat == sup_true);

  const std::string trace = tmp_path("trace.csv");
  REQUIRE(cp_am_result_write_trace_csv(res, trace.c_str()) == CP_OK);
  CHECK(std::filesystem::file_size(trace) > 0);

  cp_channel_free(h_hat);
  cp_am_result_free(res);
  cp_channel_free(h);
  cp_matrix_free(a);
}

TEST_CASE("capi: block recovery reports the certificate quantities") {
  cp_matrix* a = nullptr;
  REQUIRE(cp_coding_matrix_generate(32, 2, 31, &a) == CP_OK);
  std::vector<double> x(2);
  REQUIRE(cp_gaussian_vector(2, 32, x.data()) == CP_OK);
  std::vector<double> codeword(32);
  REQUIRE(cp_encode(a, x.data(), 2, codeword.data()) == CP_OK);
  cp_channel* h = nullptr;
  REQUIRE(cp_channel_generate(32, 1, 33, &h) == CP_OK);
  std::vector<double> y(32);
  REQUIRE(cp_channel_apply(h, codeword.data(), 32, 0.0, 0, y.data()) == CP_OK);

  cp_block_config cfg;
  cp_block_config_init(&cfg);
  cfg.tol = 1e-8;
  cfg.max_iters = 20000;
  cp_block_result* res = nullptr;
  REQUIRE(cp_recover_block(a, y.data(), 32, &cfg, &res) == CP_OK);
  CHECK(cp_block_result_converged(res) == 1);
  CHECK(cp_block_result_feasibility_gap(res) <= 1e-6);
  CHECK(cp_block_result_objective(res) > 0.0);
  CHECK(cp_block_result_spectral_ratio(res) <= 1e-2);

  std::vector<double> x_hat(2);
  REQUIRE(cp_block_result_signal(res, x_hat.data()) == CP_OK);
  cp_channel* h_hat = nullptr;
  REQUIRE(cp_block_result_channel(res, &h_hat) == CP_OK);
  CHECK(cp_channel_sparsity(h_hat) >= 1);

  cp_channel_free(h_hat);
  cp_block_result_free(res);
  cp_channel_free(h);
  cp_matrix_free(a);
}

TEST_CASE("capi: trials, baselines, phase diagrams, artifacts") {
  cp_trial_config cfg;
  cp_trial_config_init(&cfg);
  cp_trial_record rec;
  REQUIRE(cp_run_trial(64, 4, 1, 11, CP_METHOD_AM, &cfg, &rec) == CP_OK);
  CHECK(rec.success == 1);
  CHECK(std::string(rec.status) == "converged");

  cp_baseline_report rep;
  const std::string bpdn_trace = tmp_path("bpdn_trace.csv");
  REQUIRE(cp_run_baselines(64, 4, 1, 5, bpdn_trace.c_str(), &rep) == CP_OK);
  CHECK(rep.ls_rank_ok == 1);
  CHECK(rep.bpdn_support_exact == 1);
  CHECK(std::filesystem::file_size(bpdn_trace) > 0);

  const uint32_t nv[] = {4};
  const uint32_t kv[] = {1};
  cp_phase_spec spec{64, nv, 1, kv, 1, 2, 99, 1e-4};
  cp_phase_diagram* d = nullptr;
  REQUIRE(cp_phase_diagram_run(&spec, CP_METHOD_AM, &cfg, 2, &d) == CP_OK);
  REQUIRE(cp_phase_diagram_n_count(d) == 1);
  REQUIRE(cp_phase_diagram_k_count(d) == 1);
  cp_phase_cell cell;
  REQUIRE(cp_phase_diagram_cell(d, 0, 0, &cell) == CP_OK);
  CHECK(cell.rate == 1.0);
  CHECK(cp_phase_diagram_cell(d, 1, 0, &cell) == CP_ERR_INVALID_ARG);

  const std::string csv = tmp_path("d.csv"), pgm = tmp_path("d.pgm");
  REQUIRE(cp_phase_diagram_write_csv(d, csv.c_str()) == CP_OK);
  REQUIRE(cp_phase_diagram_render_pgm(d, pgm.c_str()) == CP_OK);

  cp_phase_diagram* back = nullptr;
  REQUIRE(cp_phase_diagram_read_csv(csv.c_str(), &back) == CP_OK);
  REQUIRE(cp_phase_diagram_cell(back, 0, 0, &cell) == CP_OK);
  CHECK(cell.successes == 2);

  cp_phase_diagram_free(back);
  cp_phase_diagram_free(d);
}

TEST_CASE("capi: scp1 vector round trip and io errors") {
  const std::string p = tmp_path("v.scp1");
  const double v[] = {1.0, -2.5, 3.25};
  REQUIRE(cp_write_vector(p.c_str(), v, 3) == CP_OK);

  double* back = nullptr;
  size_t len = 0;
  REQUIRE(cp_read_vector(p.c_str(), &back, &len) == CP_OK);
  REQUIRE(len == 3);
  for (int i = 0; i < 3; ++i) CHECK(back[i] == v[i]);
  cp_free(back);

  CHECK(cp_read_vector(tmp_path("nope.scp1").c_str(), &back, &len) == CP_ERR_IO);

  const std::string hp = tmp_path("h.csv");
  cp_channel* h = nullptr;
  REQUIRE(cp_channel_generate(16, 2, 3, &h) == CP_OK);
  REQUIRE(cp_channel_write_csv(h, hp.c_str()) == CP_OK);
  cp_channel* h2 = nullptr;
  REQUIRE(cp_channel_read_csv(hp.c_str(), &h2) == CP_OK);
  CHECK(cp_channel_sparsity(h2) == 2);
  cp_channel_free(h2);
  cp_channel_free(h);
}
