#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "odelik/models_builtin.hpp"
#include "odelik/rng.hpp"
#include "odelik/types.hpp"

namespace odelik {

/// One benchmark campaign: a grid of (p, n_obs) cells × seeded samples, each
/// sample running every requested (target, method) combination.
struct ExperimentConfig {
  std::string model = "linear";  // "linear" | "hiv"
  std::vector<int> p_schedule = {2};       // linear only; hiv has p = 11 fixed
  std::vector<int> n_obs_schedule = {11};
  double horizon = 100.0;
  int samples = 100;
  std::uint64_t seed = 1;
  /// Methods: "fd", "se", "asm", "smoothed" (gradient); "fd", "se", "sa",
  /// "fa" (hessian). Each runs for every requested target it supports.
  std::vector<std::string> methods = {"se", "asm"};
  std::vector<std::string> targets = {"gradient"};
  double rtol = 1e-10;
  double atol = 1e-14;
  /// "auto": exact oracle for the linear model, forward-sensitivity
  /// references for HIV. Explicit: "exact" | "se" | "sa".
  std::string reference = "auto";
  /// When false the seconds column is written as 0, making repeat runs of
  /// the same config byte-identical.
  bool record_wall_time = true;
  /// Dirac smoothing width as a fraction of the smallest observation gap.
  double smoothed_sigma_factor = 0.01;
  std::optional<double> fd_scale;   // step scale for the FD baselines
  std::optional<double> fa_scale;   // step scale for the FD-of-adjoint Hessian
  double fd_floor = 1.0;
  double fa_floor = 1.0;
  Vector hiv_theta0;  // defaults to hiv_reference_params()
  Vector hiv_u0;      // defaults to hiv_default_init_state()
  /// Output files <prefix>.csv and <prefix>.json.
  std::string output_prefix = "results";

  /// Strict parse: unknown keys are errors. Also runs validate().
  static ExperimentConfig from_json_file(const std::string& path);
  void validate() const;
};

struct ResultRow {
  std::string model;
  std::string method;
  std::string target;  // "gradient" | "hessian"
  int p = 0;
  int n_obs = 0;
  int sample = 0;
  double seconds = 0;
  long rhs_evals = 0;
  std::string ref;      // "exact" | "se" | "sa"
  double rel_err = 0;   // max-norm relative error vs the reference
  std::string status;   // "ok" or an IntegrationFailure tag
};

/// θ_k ~ U[−1.1, −0.1], the decaying-exponential regime.
Vector sample_linear_params(int p, SplitMix64& rng);

/// y ↦ U[y, y + 0.1·max(clean)] componentwise, with the max over the whole
/// clean matrix (identity when that max is ≤ 0).
Matrix perturb_data(const Matrix& clean, SplitMix64& rng);

/// θ_i ~ θ0_i·U[0.95, 1.05], then both efficacies clamped to ≤ 0.999.
Vector sample_hiv_params(const Vector& theta0, SplitMix64& rng);

/// Evenly spread interior times t_i = i·T/(n+1), i = 1…n.
std::vector<double> observation_times(int n_obs, double horizon);

/// Runs the campaign and writes <prefix>.csv and <prefix>.json.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

void write_csv(const std::vector<ResultRow>& rows, const std::string& path);
void write_summary_json(const ExperimentConfig& cfg,
                        const std::vector<ResultRow>& rows,
                        const std::string& path);

/// Empirical quantile as an exact order statistic: the 1-based ceil(q·n)-th
/// smallest value. Recomputable from the CSV.
double exact_quantile(std::vector<double> values, double q);

}  // namespace odelik
