// Benchmark and utility CLI for the odelik library.
//
//   bench run --config cfg.json        run a campaign, write <prefix>.csv/.json
//   bench validate --config cfg.json   parse and validate a config, then exit
//   bench oracle --model linear ...    print a reproducible test instance with
//                                      its closed-form derivatives as JSON

#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "odelik/bench.hpp"
#include "odelik/likelihood.hpp"
#include "odelik/models_builtin.hpp"
#include "odelik/rng.hpp"

namespace {

int cmd_run(const std::string& config_path) {
  const odelik::ExperimentConfig cfg =
      odelik::ExperimentConfig::from_json_file(config_path);
  const std::vector<odelik::ResultRow> rows = odelik::run_experiment(cfg);
  long ok = 0, failed = 0;
  for (const auto& r : rows) (r.status == "ok" ? ok : failed) += 1;
  std::cout << "wrote " << cfg.output_prefix << ".csv and "
            << cfg.output_prefix << ".json (" << ok << " ok, " << failed
            << " failed rows)\n";
  return failed == 0 ? 0 : 1;
}

int cmd_validate(const std::string& config_path) {
  const odelik::ExperimentConfig cfg =
      odelik::ExperimentConfig::from_json_file(config_path);
  std::cout << "config ok: model=" << cfg.model
            << " samples=" << cfg.samples << " seed=" << cfg.seed << "\n";
  return 0;
}

int cmd_oracle(const std::string& model, int p, int n_obs, double horizon,
               std::uint64_t seed, int sample, const std::string& csv_path) {
  if (model != "linear")
    throw std::runtime_error(
        "oracle: closed-form derivatives exist only for the linear model");
  if (p < 1) throw std::runtime_error("oracle: --p must be >= 1");
  if (n_obs < 1) throw std::runtime_error("oracle: --n-obs must be >= 1");

  // Same stream derivation as the campaign, so this instance matches the
  // row (p, n_obs, sample) of a run with the same seed.
  odelik::SplitMix64 rng(odelik::SplitMix64::derive(
      seed, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(n_obs),
      static_cast<std::uint64_t>(sample)));
  const std::vector<double> times = odelik::observation_times(n_obs, horizon);
  const odelik::Vector theta = odelik::sample_linear_params(p, rng);
  odelik::Matrix clean(n_obs, p);
  for (int i = 0; i < n_obs; ++i)
    for (int k = 0; k < p; ++k)
      clean(i, k) = std::exp(theta[k] * times[static_cast<std::size_t>(i)]);
  const odelik::Matrix data = odelik::perturb_data(clean, rng);

  // Report the misfit convention (J = sum of squared-error terms), matching
  // what the gradient/hessian methods of the library return.
  const odelik::Vector grad =
      -odelik::exact_gradient_linear(theta, times, data);
  const odelik::Matrix hess =
      -odelik::exact_hessian_linear(theta, times, data);

  using json = nlohmann::ordered_json;
  json out;
  out["model"] = model;
  out["p"] = p;
  out["n_obs"] = n_obs;
  out["horizon"] = horizon;
  out["seed"] = seed;
  out["sample"] = sample;
  out["theta"] = std::vector<double>(theta.data(), theta.data() + theta.size());
  out["times"] = times;
  json rows = json::array();
  for (int i = 0; i < n_obs; ++i)
    rows.push_back(std::vector<double>(data.row(i).begin(), data.row(i).end()));
  out["data"] = std::move(rows);
  out["misfit_gradient"] =
      std::vector<double>(grad.data(), grad.data() + grad.size());
  json hrows = json::array();
  for (int k = 0; k < p; ++k)
    hrows.push_back(std::vector<double>(hess.row(k).begin(), hess.row(k).end()));
  out["misfit_hessian"] = std::move(hrows);
  std::cout << out.dump(2) << "\n";

  if (!csv_path.empty()) {
    odelik::ObservationSet(times, data).to_csv(csv_path);
    std::cerr << "wrote observations to " << csv_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ODE likelihood derivative benchmarks"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a benchmark campaign");
  run->add_option("--config", config_path, "JSON config file")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Validate a config file");
  validate->add_option("--config", validate_path, "JSON config file")
      ->required();

  std::string model = "linear";
  int p = 2;
  int n_obs = 11;
  double horizon = 100.0;
  std::uint64_t seed = 1;
  int sample = 0;
  std::string csv_path;
  auto* oracle = app.add_subcommand(
      "oracle", "Print a reproducible instance with closed-form derivatives");
  oracle->add_option("--model", model, "Model name (linear)");
  oracle->add_option("--p", p, "Parameter count");
  oracle->add_option("--n-obs", n_obs, "Observation count");
  oracle->add_option("--horizon", horizon, "Time horizon");
  oracle->add_option("--seed", seed, "Campaign seed");
  oracle->add_option("--sample", sample, "Sample index within the cell");
  oracle->add_option("--csv", csv_path, "Also write the observations as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path);
    if (*validate) return cmd_validate(validate_path);
    return cmd_oracle(model, p, n_obs, horizon, seed, sample, csv_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
