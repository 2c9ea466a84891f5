#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "odelik/bench.hpp"
#include "odelik/rng.hpp"

using odelik::ExperimentConfig;
using odelik::Matrix;
using odelik::ResultRow;
using odelik::SplitMix64;
using odelik::Vector;

namespace {

std::string write_temp_json(const std::string& name, const std::string& body) {
  std::ofstream out(name);
  out << body;
  return name;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("parameter draws live in the documented ranges and replay exactly") {
  SplitMix64 a(SplitMix64::derive(1, 2, 11, 0));
  SplitMix64 b(SplitMix64::derive(1, 2, 11, 0));
  SplitMix64 c(SplitMix64::derive(1, 2, 11, 1));
  const Vector ta = odelik::sample_linear_params(8, a);
  const Vector tb = odelik::sample_linear_params(8, b);
  const Vector tc = odelik::sample_linear_params(8, c);
  for (int i = 0; i < 8; ++i) {
    CHECK(ta[i] >= -1.1);
    CHECK(ta[i] <= -0.1);
    CHECK(ta[i] == tb[i]);
  }
  CHECK((ta - tc).cwiseAbs().maxCoeff() > 0.0);

  const Vector th0 = odelik::hiv_reference_params();
  SplitMix64 d(5);
  const Vector th = odelik::sample_hiv_params(th0, d);
  for (int i = 0; i < 11; ++i) {
    CHECK(th[i] >= 0.95 * th0[i] - 1e-15);
    CHECK(th[i] <= 1.05 * th0[i] + 1e-15);
  }
  CHECK(th[9] <= 0.999);
  CHECK(th[10] <= 0.999);
}

TEST_CASE("perturbation is the identity on nonpositive data") {
  SplitMix64 rng(9);
  const Matrix zeros = Matrix::Zero(3, 2);
  const Matrix out = odelik::perturb_data(zeros, rng);
  CHECK(out.cwiseAbs().maxCoeff() == 0.0);

  SplitMix64 rng2(9);
  Matrix pos(2, 1);
  pos << 1.0, 2.0;
  const Matrix bumped = odelik::perturb_data(pos, rng2);
  CHECK(bumped(0, 0) >= 1.0);
  CHECK(bumped(0, 0) <= 1.2);
  CHECK(bumped(1, 0) >= 2.0);
  CHECK(bumped(1, 0) <= 2.2);
}

TEST_CASE("observation times split the horizon evenly, endpoints excluded") {
  const std::vector<double> t = odelik::observation_times(3, 8.0);
  REQUIRE(t.size() == 3);
  CHECK(t[0] == doctest::Approx(2.0));
  CHECK(t[1] == doctest::Approx(4.0));
  CHECK(t[2] == doctest::Approx(6.0));
  CHECK_THROWS_AS(odelik::observation_times(0, 8.0), std::invalid_argument);
}

TEST_CASE("quantiles are exact order statistics") {
  const std::vector<double> v = {3.0, 1.0, 2.0, 5.0, 4.0};
  CHECK(odelik::exact_quantile(v, 0.5) == 3.0);
  CHECK(odelik::exact_quantile(v, 0.0) == 1.0);
  CHECK(odelik::exact_quantile(v, 1.0) == 5.0);
  CHECK(odelik::exact_quantile(v, 0.2) == 1.0);
  CHECK(odelik::exact_quantile(v, 0.21) == 2.0);
  CHECK_THROWS_AS(odelik::exact_quantile({}, 0.5), std::invalid_argument);
}

TEST_CASE("config files reject unknown keys and bad types") {
  const std::string good = write_temp_json("cfg_good_test.json", R"({
    "model": "linear", "p_schedule": [2], "n_obs_schedule": [3],
    "samples": 2, "seed": 7, "methods": ["se"], "targets": ["gradient"],
    "output_prefix": "cfg_good_out"
  })");
  const ExperimentConfig cfg = ExperimentConfig::from_json_file(good);
  CHECK(cfg.samples == 2);
  CHECK(cfg.seed == 7);
  std::remove(good.c_str());

  const std::string unknown = write_temp_json("cfg_unknown_test.json",
                                              R"({"model": "linear", "samplez": 3})");
  bool saw_key = false;
  try {
    ExperimentConfig::from_json_file(unknown);
  } catch (const std::runtime_error& e) {
    saw_key = std::string(e.what()).find("samplez") != std::string::npos;
  }
  CHECK(saw_key);
  std::remove(unknown.c_str());

  const std::string badtype = write_temp_json("cfg_badtype_test.json",
                                              R"({"samples": "many"})");
  CHECK_THROWS_AS(ExperimentConfig::from_json_file(badtype),
                  std::runtime_error);
  std::remove(badtype.c_str());

  ExperimentConfig invalid;
  invalid.methods = {"sa"};
  invalid.targets = {"gradient"};  // sa cannot produce a gradient
  CHECK_THROWS_AS(invalid.validate(), std::invalid_argument);

  ExperimentConfig exact_hiv;
  exact_hiv.model = "hiv";
  exact_hiv.reference = "exact";
  CHECK_THROWS_AS(exact_hiv.validate(), std::invalid_argument);
}

TEST_CASE("a small campaign runs deterministically and hits the reference") {
  ExperimentConfig cfg;
  cfg.model = "linear";
  cfg.p_schedule = {2};
  cfg.n_obs_schedule = {3};
  cfg.samples = 2;
  cfg.seed = 11;
  cfg.methods = {"se", "asm"};
  cfg.targets = {"gradient"};
  cfg.record_wall_time = false;
  cfg.output_prefix = "bench_small_test";
  // Keep exp(theta * t) macroscopic at every observation time; at long
  // horizons the decaying states drop below the solver's absolute floor and
  // the reference gradient itself becomes noise-dominated.
  cfg.horizon = 10.0;

  const std::vector<ResultRow> rows = odelik::run_experiment(cfg);
  REQUIRE(rows.size() == 4);
  for (const ResultRow& r : rows) {
    CHECK(r.status == "ok");
    CHECK(r.ref == "exact");
    CHECK(r.rel_err < 1e-6);
    CHECK(r.seconds == 0.0);
    CHECK(r.rhs_evals > 0);
  }
  // Row order: samples in the outer loop, methods inner.
  CHECK(rows[0].sample == 0);
  CHECK(rows[0].method == "se");
  CHECK(rows[1].method == "asm");
  CHECK(rows[2].sample == 1);

  // The CSV starts with the pinned header.
  std::ifstream csv("bench_small_test.csv");
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header ==
        "model,method,target,p,n_obs,sample,seconds,rhs_evals,ref,rel_err,status");
  csv.close();

  const std::vector<ResultRow> again = odelik::run_experiment(cfg);
  REQUIRE(again.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].rel_err == again[i].rel_err);
    CHECK(rows[i].rhs_evals == again[i].rhs_evals);
  }
  std::remove("bench_small_test.csv");
  std::remove("bench_small_test.json");
}

TEST_CASE("denser sampling erodes the forward method's advantage") {
  // The sensitivity solve passes every measurement in one sweep, so its cost
  // barely moves with n_obs; the adjoint sweep restarts at each measurement.
  ExperimentConfig cfg;
  cfg.model = "hiv";
  cfg.n_obs_schedule = {2, 5, 11};
  cfg.samples = 1;
  cfg.seed = 3;
  cfg.methods = {"se", "asm"};
  cfg.targets = {"gradient"};
  cfg.reference = "se";
  cfg.rtol = 1e-8;
  cfg.atol = 1e-10;
  cfg.horizon = 40.0;
  cfg.record_wall_time = false;
  cfg.output_prefix = "bench_hiv_trend_test";

  const std::vector<ResultRow> rows = odelik::run_experiment(cfg);
  std::map<int, std::map<std::string, long>> evals;
  for (const ResultRow& r : rows) {
    REQUIRE(r.status == "ok");
    evals[r.n_obs][r.method] = r.rhs_evals;
  }
  std::vector<double> ratio;
  for (int n : {2, 5, 11})
    ratio.push_back(static_cast<double>(evals[n]["se"]) /
                    static_cast<double>(evals[n]["asm"]));
  CHECK(ratio[0] > ratio[1]);
  CHECK(ratio[1] > ratio[2]);
  std::remove("bench_hiv_trend_test.csv");
  std::remove("bench_hiv_trend_test.json");
}

}  // TEST_SUITE
