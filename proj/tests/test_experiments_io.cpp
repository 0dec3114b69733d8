#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/experiments.hpp"
#include "core/rng.hpp"
#include "doctest.h"

using namespace chanprot;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("chanprot_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  return std::string(std::istreambuf_iterator<char>(is), {});
}

}  // namespace

TEST_CASE("scp1: vector and matrix round trips are bit exact") {
  const std::string vp = tmp_path("v.scp1"), mp = tmp_path("m.scp1");
  Rng rng(1);
  const Vec v = rng.gaussian_vec(17);
  write_vector_scp1(vp, v);
  CHECK(read_vector_scp1(vp) == v);

  Matrix m(5, 3);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) m(i, j) = rng.gaussian();
  write_matrix_scp1(mp, m);
  const Matrix back = read_matrix_scp1(mp);
  REQUIRE(back.rows() == 5);
  REQUIRE(back.cols() == 3);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(back(i, j) == m(i, j));

  // header starts with the magic and the right rank
  const std::string raw = slurp(vp);
  CHECK(raw.substr(0, 4) == "SCP1");
  CHECK(raw[4] == 1);

  CHECK_THROWS_AS(read_vector_scp1(mp), IoError);
  CHECK_THROWS_AS(read_vector_scp1(tmp_path("missing.scp1")), IoError);
}

TEST_CASE("channel csv round trip") {
  const std::string p = tmp_path("h.csv");
  const Channel h = generate_channel(64, 5, 7);
  write_channel_csv(p, h);
  const Channel back = read_channel_csv(p);
  CHECK(back.m == h.m);
  CHECK(back.support == h.support);
  CHECK(back.taps == h.taps);
}

TEST_CASE("pgm: write/read round trip") {
  const std::string p = tmp_path("img.pgm");
  Pgm img{3, 2, {0, 128, 255, 7, 9, 200}};
  write_pgm(p, img);
  const Pgm back = read_pgm(p);
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.pixels == img.pixels);
}

TEST_CASE("run_trial: determinism and the easy k=1 regime") {
  TrialConfig cfg;
  const TrialRecord r1 = run_trial(64, 4, 1, 11, Method::am, cfg);
  const TrialRecord r2 = run_trial(64, 4, 1, 11, Method::am, cfg);
  CHECK(r1.success);
  CHECK(r1.success == r2.success);
  CHECK(r1.rel_err_x == r2.rel_err_x);
  CHECK(r1.rel_err_h == r2.rel_err_h);
  CHECK(r1.iterations == r2.iterations);
  CHECK(r1.status == r2.status);
}

TEST_CASE("run_trial: infeasible regime fails without crashing") {
  TrialConfig cfg;
  cfg.am.max_iters = 12;
  const TrialRecord rec = run_trial(64, 60, 32, 3, Method::am, cfg);
  CHECK(!rec.success);
  CHECK(rec.status != "converged");
}

TEST_CASE("run_trial: noisy runs report errors but are not judged by default") {
  TrialConfig cfg;
  cfg.noise_sigma = 1e-6;
  const TrialRecord rec = run_trial(64, 4, 1, 11, Method::am, cfg);
  CHECK(!rec.success);
  CHECK(rec.rel_err_x < 1e-3);  // still close, just not judged
}

TEST_CASE("phase diagram: single easy cell rates 1.0 and artifacts round trip") {
  PhaseGridSpec spec;
  spec.m = 64;
  spec.n_values = {4};
  spec.k_values = {1};
  spec.trials = 1;
  spec.base_seed = 5;
  const PhaseDiagram d = run_phase_diagram(spec, Method::am, TrialConfig{});
  REQUIRE(d.cells.size() == 1);
  CHECK(d.cells[0].successes == 1);
  CHECK(d.rate(d.cells[0]) == 1.0);

  const std::string csv = tmp_path("d.csv");
  write_diagram_csv(d, csv);
  const PhaseDiagram back = read_diagram_csv(csv);
  REQUIRE(back.cells.size() == 1);
  CHECK(back.cells[0].successes == 1);
  CHECK(back.spec.m == 64);
  CHECK(back.spec.trials == 1);
}

TEST_CASE("phase diagram: deterministic across runs and worker counts") {
  PhaseGridSpec spec;
  spec.m = 48;
  spec.n_values = {4, 8};
  spec.k_values = {1, 2};
  spec.trials = 2;
  spec.base_seed = 77;

  const std::string c1 = tmp_path("d1.csv"), c2 = tmp_path("d2.csv"), c3 = tmp_path("d3.csv");
  write_diagram_csv(run_phase_diagram(spec, Method::am, TrialConfig{}, 1), c1);
  write_diagram_csv(run_phase_diagram(spec, Method::am, TrialConfig{}, 1), c2);
  write_diagram_csv(run_phase_diagram(spec, Method::am, TrialConfig{}, 3), c3);
  CHECK(slurp(c1) == slurp(c2));
  CHECK(slurp(c1) == slurp(c3));
}

TEST_CASE("render_pgm: orientation, quantization, contour") {
  PhaseDiagram d;
  d.spec.m = 32;
  d.spec.n_values = {4, 8};
  d.spec.k_values = {1, 2, 4};
  d.spec.trials = 2;
  // rates: n=4 -> 1.0, 1.0, 0.5 ; n=8 -> 1.0, 0.0, 0.0 (k ascending)
  d.cells = {
      {4, 1, 2, 0.0, 0.0}, {4, 2, 2, 0.0, 0.0}, {4, 4, 1, 0.0, 0.0},
      {8, 1, 2, 0.0, 0.0}, {8, 2, 0, 0.0, 0.0}, {8, 4, 0, 0.0, 0.0},
  };

  const std::string pgm = tmp_path("diag.pgm");
  render_pgm(d, pgm);
  const Pgm img = read_pgm(pgm);
  REQUIRE(img.width == 2);   // n values
  REQUIRE(img.height == 3);  // k values
  // row 0 is k=1: both full success
  CHECK(img.pixels[0] == 255);
  CHECK(img.pixels[1] == 255);
  // row 1 is k=2: n=4 passes, n=8 fails
  CHECK(img.pixels[2] == 255);
  CHECK(img.pixels[3] == 0);
  // row 2 is k=4: rate 0.5 quantizes to 128 (round half up)
  CHECK(img.pixels[4] == 128);
  CHECK(img.pixels[5] == 0);

  const std::string contour = slurp(contour_path_for(pgm));
  // boundary cells: (4,1) neighbors (8,1)? both 1.0 -> (4,1) borders (4,4)=0.5 below
  CHECK(contour.find("4,2,") != std::string::npos);   // passes, neighbor (4,4) fails
  CHECK(contour.find("8,1,") != std::string::npos);   // passes, neighbor (8,2) fails
  CHECK(contour.find("4,4") == std::string::npos);    // failing cell is not on the contour
}

TEST_CASE("render_pgm: all-success and all-failure grids") {
  PhaseDiagram d;
  d.spec.m = 16;
  d.spec.n_values = {2, 4};
  d.spec.k_values = {1, 2};
  d.spec.trials = 3;
  d.cells = {{2, 1, 3, 0, 0}, {2, 2, 3, 0, 0}, {4, 1, 3, 0, 0}, {4, 2, 3, 0, 0}};
  const std::string p1 = tmp_path("all1.pgm");
  render_pgm(d, p1);
  for (auto px : read_pgm(p1).pixels) CHECK(px == 255);

  for (auto& c : d.cells) c.successes = 0;
  const std::string p0 = tmp_path("all0.pgm");
  render_pgm(d, p0);
  for (auto px : read_pgm(p0).pixels) CHECK(px == 0);
  // an all-failure grid has no 95% region at all
  CHECK(slurp(contour_path_for(p0)) == "n,k,rate\n");
}

TEST_CASE("baselines: easy regimes recover both sides") {
  const BaselineReport easy = run_baselines(64, 4, 1, 5);
  CHECK(easy.ls_rank_ok);
  CHECK(easy.ls_rel_err <= 1e-8);
  CHECK(easy.bpdn_ok);
  CHECK(easy.bpdn_support_exact);
  CHECK(easy.bpdn_rel_err <= 1e-6);

  const BaselineReport std_case = run_baselines(128, 32, 4, 6);
  CHECK(std_case.ls_rank_ok);
  CHECK(std_case.ls_rel_err <= 1e-8);
  CHECK(std_case.bpdn_rel_err <= 1e-6);
}

TEST_CASE("baselines: dense channel boundary is defined") {
  // k = m: known-channel side still works when H passes the rank check
  const BaselineReport rep = run_baselines(32, 4, 32, 9);
  if (rep.ls_rank_ok) CHECK(rep.ls_rel_err <= 1e-6);
}

TEST_CASE("phase spec validation") {
  PhaseGridSpec spec;
  spec.m = 16;
  spec.n_values = {16};
  spec.k_values = {1};
  CHECK_THROWS_AS(run_phase_diagram(spec, Method::am, TrialConfig{}), DimensionError);
}
