#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "washerkorn/error.hpp"
#include "washerkorn/scaling.hpp"
#include "washerkorn/sweep.hpp"

using namespace wk;

TEST_SUITE_BEGIN("sweep");

TEST_CASE("fit recovers an exact square law") {
  const auto fit = fit_exponent({{0.1, 0.01}, {0.05, 0.0025}, {0.025, 0.000625}});
  CHECK(fit.exponent == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(fit.intercept) < 1e-12);
  CHECK(fit.max_residual < 1e-12);
}

TEST_CASE("fit intercept is log of the prefactor") {
  std::vector<std::pair<double, double>> pts;
  for (double h : {0.2, 0.1, 0.05, 0.025}) pts.emplace_back(h, 7.0 * h);
  const auto fit = fit_exponent(pts);
  CHECK(fit.exponent == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fit.intercept == doctest::Approx(std::log(7.0)).epsilon(1e-13));
}

TEST_CASE("fit reports the worst log residual") {
  const auto fit = fit_exponent({{1.0, 1.0}, {2.0, 2.0 * std::exp(0.3)}, {4.0, 4.0}});
  CHECK(fit.max_residual > 0.1);
  CHECK(fit.max_residual < 0.3);
}

TEST_CASE("fit rejects degenerate input") {
  CHECK_THROWS_AS(fit_exponent({{0.1, 1.0}, {0.05, 0.5}}), InvalidArgument);
  CHECK_THROWS_AS(fit_exponent({{0.1, 1.0}, {0.05, 0.0}, {0.025, 0.1}}), InvalidArgument);
  CHECK_THROWS_AS(fit_exponent({{0.1, 1.0}, {-0.05, 0.5}, {0.025, 0.1}}), InvalidArgument);
  CHECK_THROWS_AS(fit_exponent({{0.1, 1.0}, {0.1, 0.5}, {0.1, 0.1}}), InvalidArgument);
  CHECK_THROWS_AS(fit_exponent({{0.1, 1.0}, {0.05, NAN}, {0.025, 0.1}}), InvalidArgument);
}

TEST_CASE("sweep configuration validation") {
  SweepConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.h_list = {0.05, 0.1};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.h_list = {0.1, 0.1};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.h_list = {0.6, 0.1};  // h > c r
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.h_list = {};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = SweepConfig{};
  cfg.alpha = 0.7;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = SweepConfig{};
  cfg.stress = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("study names round-trip") {
  for (auto s : {Study::Korn1, Study::Korn15, Study::Ansatz, Study::Buckling, Study::Audit})
    CHECK(parse_study(to_string(s)) == s);
  CHECK_THROWS_AS(parse_study("korn2"), InvalidArgument);
  CHECK(fixed_constant_inequalities().size() == 8);
}

TEST_CASE("ansatz sweep output is deterministic") {
  SweepConfig cfg;
  cfg.h_list = {0.1, 0.05, 0.025};
  cfg.workers = 3;
  const auto a = run_sweep(cfg, Study::Ansatz);
  cfg.workers = 1;
  const auto b = run_sweep(cfg, Study::Ansatz);
  CHECK(a.csv_body() == b.csv_body());
  CHECK(a.summary() == b.summary());
  REQUIRE(a.rows.size() == 3);
  CHECK(a.csv_body().rfind("h,strain_sq,grad_sq,uz_sq,ratio,quad_error\n", 0) == 0);
  const auto* e = a.find("strain_sq");
  REQUIRE(e);
  REQUIRE(e->fit);
  CHECK(e->in_band());
}

TEST_CASE("written CSV has one timestamp line then the body") {
  SweepConfig cfg;
  cfg.h_list = {0.1, 0.05, 0.025};
  const auto res = run_sweep(cfg, Study::Ansatz);
  const auto dir = std::filesystem::temp_directory_path() /
                   ("wk_sweep_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  write_sweep(res, dir.string());
  std::ifstream in(dir / "ansatz.csv");
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("# generated ", 0) == 0);
  std::stringstream rest;
  rest << in.rdbuf();
  CHECK(rest.str() == res.csv_body());
  CHECK(std::filesystem::exists(dir / "ansatz_summary.txt"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("korn1 smoke sweep on a coarse grid") {
  SweepConfig cfg;
  cfg.h_list = {0.1, 0.05};
  cfg.grid = {16, 4, 1};
  cfg.grid_levels = 2;
  cfg.mode_cutoff = 3;
  const auto res = run_sweep(cfg, Study::Korn1);
  REQUIRE(res.rows.size() == 2);
  const auto* k = res.find("K");
  REQUIRE(k);
  CHECK(k->value[1] < k->value[0]);
  // Two points give no fit, and that is not a failure.
  CHECK_FALSE(k->fit.has_value());
  CHECK(res.ok());
}

TEST_CASE("unconverged points are excluded from fits") {
  SweepConfig cfg;
  cfg.h_list = {0.1, 0.05, 0.025};
  cfg.grid = {8, 4, 1};
  cfg.grid_levels = 1;  // a single grid never counts as converged
  cfg.mode_cutoff = 2;
  const auto res = run_sweep(cfg, Study::Korn1);
  const auto* k = res.find("K");
  REQUIRE(k);
  for (bool c : k->converged) CHECK_FALSE(c);
  CHECK_FALSE(k->fit.has_value());
  CHECK_FALSE(res.ok());
  CHECK(res.summary().find("K.excluded_unconverged = 3") != std::string::npos);
}

TEST_CASE("sweep errors carry the task key and partial rows") {
  SweepResult partial;
  partial.rows.push_back({"0.1", "1"});
  const SweepError e("h=0.05", "solver stalled", partial);
  CHECK(e.key() == "h=0.05");
  CHECK(std::string(e.what()) == "h=0.05: solver stalled");
  CHECK(e.partial().rows.size() == 1);
}

TEST_SUITE_END();
