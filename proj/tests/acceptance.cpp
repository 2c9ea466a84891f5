// Acceptance gate: one self-contained check per release criterion, each
// printing a single [PASS]/[FAIL] line with the measured numbers. Run all
// with no arguments or a single one with --criterion N. Exit code is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "odelik/adjoint.hpp"
#include "odelik/bench.hpp"
#include "odelik/fd.hpp"
#include "odelik/forward_sens.hpp"
#include "odelik/models_builtin.hpp"

using namespace odelik;

namespace {

SolverConfig tight() {
  SolverConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-14;
  return cfg;
}

double rel_max(const Vector& x, const Vector& ref) {
  const double s = ref.cwiseAbs().maxCoeff();
  const double d = (x - ref).cwiseAbs().maxCoeff();
  return s > 0 ? d / s : d;
}

double rel_max(const Matrix& x, const Matrix& ref) {
  const double s = ref.cwiseAbs().maxCoeff();
  const double d = (x - ref).cwiseAbs().maxCoeff();
  return s > 0 ? d / s : d;
}

struct LinearSample {
  Vector theta;
  ObservationSet obs;
};

LinearSample linear_sample(int p, int n_obs, double horizon, std::uint64_t seed,
                           int sample, std::uint64_t theta_label_n_obs) {
  // theta_label_n_obs lets a caller reuse one theta across n_obs cells.
  SplitMix64 theta_rng(SplitMix64::derive(seed, static_cast<std::uint64_t>(p),
                                          theta_label_n_obs,
                                          static_cast<std::uint64_t>(sample)));
  const Vector theta = sample_linear_params(p, theta_rng);
  SplitMix64 data_rng(SplitMix64::derive(
      seed + 1, static_cast<std::uint64_t>(p),
      static_cast<std::uint64_t>(n_obs), static_cast<std::uint64_t>(sample)));
  const std::vector<double> times = observation_times(n_obs, horizon);
  Matrix data(n_obs, p);
  for (int i = 0; i < n_obs; ++i)
    for (int k = 0; k < p; ++k)
      data(i, k) = std::exp(theta[k] * times[static_cast<std::size_t>(i)]);
  data = perturb_data(data, data_rng);
  return LinearSample{theta, ObservationSet(times, std::move(data))};
}

struct HivSample {
  ModelSpec model;
  Vector theta;
  ObservationSet obs;
  PostProcessor post;
  GaussianMetric metric;
};

HivSample hiv_sample(int n_obs, double horizon, std::uint64_t seed, int sample,
                     bool at_reference) {
  SplitMix64 rng(SplitMix64::derive(seed, 11, static_cast<std::uint64_t>(n_obs),
                                    static_cast<std::uint64_t>(sample)));
  ModelSpec model = make_hiv(hiv_default_init_state(), horizon);
  const Vector theta =
      at_reference ? hiv_reference_params()
                   : sample_hiv_params(hiv_reference_params(), rng);
  PostProcessor post(hiv_observation_matrix());
  const std::vector<double> times = observation_times(n_obs, horizon);

  const RhsFn rhs = [&model, &theta](double t, const Vector& u, Vector& du) {
    du = model.rhs(t, u, theta);
  };
  const IntegrationResult fwd =
      integrate(rhs, model.init_state(theta), 0.0, horizon, times, tight(),
                nullptr, DenseStorage::NodesOnly);
  Matrix data(n_obs, 2);
  for (int i = 0; i < n_obs; ++i)
    data.row(i) =
        (post.P * fwd.node_states[static_cast<std::size_t>(i) + 1]).transpose();
  data = perturb_data(data, rng);
  return HivSample{std::move(model), theta, ObservationSet(times, std::move(data)),
                   std::move(post), GaussianMetric::identity(2)};
}

long median3(long a, long b, long c) {
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
  return b;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// 1. Adjoint and forward-sensitivity gradients agree with the closed form.
Outcome criterion1() {
  const int p = 10, n_obs = 11;
  const double T = 100.0;
  const ModelSpec model = make_linear_diagonal(p, T);
  const GaussianMetric metric = GaussianMetric::identity(p);
  const PostProcessor id = PostProcessor::identity(p);

  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    const LinearSample smp = linear_sample(p, n_obs, T, 101, s, n_obs);
    const Vector gref =
        -exact_gradient_linear(smp.theta, smp.obs.times(), smp.obs.values());
    const DerivativeReport ga =
        gradient_asm(model, smp.obs, metric, id, smp.theta, tight());
    const DerivativeReport gs =
        gradient_se(model, smp.obs, metric, id, smp.theta, tight());
    worst = std::max({worst, rel_max(ga.gradient, gref),
                      rel_max(gs.gradient, gref)});
  }
  std::ostringstream os;
  os << "max rel err " << worst << " over 20 samples (bound 1e-6)";
  return {worst < 1e-6, os.str()};
}

// ---------------------------------------------------------------------------
// 2. The one-sweep Hessian agrees with the closed form.
Outcome criterion2() {
  const int p = 10, n_obs = 11;
  const double T = 100.0;
  const ModelSpec model = make_linear_diagonal(p, T);
  const GaussianMetric metric = GaussianMetric::identity(p);
  const PostProcessor id = PostProcessor::identity(p);

  double worst = 0.0;
  for (int s = 0; s < 10; ++s) {
    const LinearSample smp = linear_sample(p, n_obs, T, 102, s, n_obs);
    const Matrix href =
        -exact_hessian_linear(smp.theta, smp.obs.times(), smp.obs.values());
    const DerivativeReport h =
        hessian_sa(model, smp.obs, metric, id, smp.theta, tight());
    worst = std::max(worst, rel_max(h.hessian, href));
  }
  std::ostringstream os;
  os << "max rel err " << worst << " over 10 samples (bound 1e-8)";
  return {worst < 1e-8, os.str()};
}

// ---------------------------------------------------------------------------
// 3. Differencing adjoint gradients reproduces the one-sweep Hessian.
Outcome criterion3() {
  const GaussianMetric metric_l = GaussianMetric::identity(10);
  const PostProcessor id_l = PostProcessor::identity(10);
  const ModelSpec linear = make_linear_diagonal(10, 100.0);

  // Forward-differencing a gradient that is itself accurate to ~1e-10 has
  // error h * T3 + 1e-10 / h, where T3 collects third derivatives; with
  // observation times reaching t = 92 those grow like t^3 against the
  // Hessian's t^2, so the balance point sits near 3e-6 rather than at the
  // value-differencing default of sqrt(rtol).
  FdStep step_l{3e-6, 1.0};
  double worst_linear = 0.0;
  for (int s = 0; s < 10; ++s) {
    const LinearSample smp = linear_sample(10, 11, 100.0, 103, s, 11);
    const DerivativeReport sa =
        hessian_sa(linear, smp.obs, metric_l, id_l, smp.theta, tight());
    const DerivativeReport fa =
        hessian_fa(linear, smp.obs, metric_l, id_l, smp.theta, step_l, tight());
    worst_linear = std::max(worst_linear, rel_max(fa.hessian, sa.hessian));
  }

  // The virus model's parameters span seven orders of magnitude, so the
  // steps must be purely relative (floor 0); the scale is set where the
  // solver-noise and truncation contributions balance.
  double worst_hiv = 0.0;
  for (int s = 0; s < 10; ++s) {
    const HivSample smp = hiv_sample(6, 40.0, 104, s, false);
    const DerivativeReport sa = hessian_sa(smp.model, smp.obs, smp.metric,
                                           smp.post, smp.theta, tight());
    FdStep step{1e-5, 0.0};
    const DerivativeReport fa = hessian_fa(smp.model, smp.obs, smp.metric,
                                           smp.post, smp.theta, step, tight());
    worst_hiv = std::max(worst_hiv, rel_max(fa.hessian, sa.hessian));
  }

  std::ostringstream os;
  os << "max rel diff linear " << worst_linear << ", virus " << worst_hiv
     << " (bound 1e-4, 10 samples each)";
  return {worst_linear <= 1e-4 && worst_hiv <= 1e-4, os.str()};
}

// ---------------------------------------------------------------------------
// 4. Gradient cost in model-equivalent evaluations: the adjoint sweep is
//    nearly flat in p, forward sensitivities are not.
Outcome criterion4() {
  const std::vector<int> ps = {2, 12, 32, 52};
  const int n_obs = 11;
  const double T = 100.0;

  std::vector<long> asm_evals, se_evals;
  for (int p : ps) {
    const ModelSpec model = make_linear_diagonal(p, T);
    const GaussianMetric metric = GaussianMetric::identity(p);
    const PostProcessor id = PostProcessor::identity(p);
    long a[3], s[3];
    for (int k = 0; k < 3; ++k) {
      const LinearSample smp = linear_sample(p, n_obs, T, 105, k, n_obs);
      a[k] = gradient_asm(model, smp.obs, metric, id, smp.theta, tight())
                 .rhs_evals;
      s[k] = gradient_se(model, smp.obs, metric, id, smp.theta, tight())
                 .rhs_evals;
    }
    asm_evals.push_back(median3(a[0], a[1], a[2]));
    se_evals.push_back(median3(s[0], s[1], s[2]));
  }

  const double asm_growth =
      static_cast<double>(asm_evals.back()) / static_cast<double>(asm_evals[0]);
  const double se_growth =
      static_cast<double>(se_evals.back()) / static_cast<double>(se_evals[0]);
  bool ratio_increasing = true;
  for (std::size_t i = 1; i < ps.size(); ++i) {
    const double prev = static_cast<double>(se_evals[i - 1]) /
                        static_cast<double>(asm_evals[i - 1]);
    const double cur =
        static_cast<double>(se_evals[i]) / static_cast<double>(asm_evals[i]);
    ratio_increasing = ratio_increasing && cur > prev;
  }

  std::ostringstream os;
  os << "adjoint x" << asm_growth << " (bound <2), sensitivities x" << se_growth
     << " (bound >5), cost ratio strictly increasing: "
     << (ratio_increasing ? "yes" : "no");
  return {asm_growth < 2.0 && se_growth > 5.0 && ratio_increasing, os.str()};
}

// ---------------------------------------------------------------------------
// 5. Measurement count drives the adjoint's backward step count but barely
//    moves the forward-sensitivity cost.
Outcome criterion5() {
  const std::vector<int> ns = {2, 12, 62, 122};
  const int p = 50;
  const double T = 100.0;
  const ModelSpec model = make_linear_diagonal(p, T);
  const GaussianMetric metric = GaussianMetric::identity(p);
  const PostProcessor id = PostProcessor::identity(p);

  std::vector<long> back_steps, se_evals;
  for (int n : ns) {
    long b[3], s[3];
    for (int k = 0; k < 3; ++k) {
      // One theta per k, shared across the n_obs cells (label 0).
      const LinearSample smp = linear_sample(p, n, T, 106, k, 0);
      b[k] = gradient_asm(model, smp.obs, metric, id, smp.theta, tight())
                 .backward_steps;
      s[k] = gradient_se(model, smp.obs, metric, id, smp.theta, tight())
                 .rhs_evals;
    }
    back_steps.push_back(median3(b[0], b[1], b[2]));
    se_evals.push_back(median3(s[0], s[1], s[2]));
  }

  bool nondecreasing = true;
  for (std::size_t i = 1; i < ns.size(); ++i)
    nondecreasing = nondecreasing && back_steps[i] >= back_steps[i - 1];
  const double back_growth = static_cast<double>(back_steps.back()) /
                             static_cast<double>(back_steps.front());
  long se_min = se_evals[0], se_max = se_evals[0];
  for (long v : se_evals) {
    se_min = std::min(se_min, v);
    se_max = std::max(se_max, v);
  }
  const double se_spread =
      static_cast<double>(se_max) / static_cast<double>(se_min);

  std::ostringstream os;
  os << "backward steps " << back_steps[0] << "->" << back_steps.back()
     << " (nondecreasing: " << (nondecreasing ? "yes" : "no") << ", x"
     << back_growth << " >= 2), sensitivity evals spread x" << se_spread
     << " (bound <1.5)";
  return {nondecreasing && back_growth >= 2.0 && se_spread < 1.5, os.str()};
}

// ---------------------------------------------------------------------------
// 6. Evaluation-count laws of the differenced Hessians.
Outcome criterion6() {
  const int n_obs = 5;
  const double T = 20.0;
  const std::vector<int> ps = {2, 6, 12};

  std::vector<double> counts;
  bool exact_fd = true, exact_fa = true;
  for (int p : ps) {
    const ModelSpec model = make_linear_diagonal(p, T);
    const GaussianMetric metric = GaussianMetric::identity(p);
    const PostProcessor id = PostProcessor::identity(p);
    const LinearSample smp = linear_sample(p, n_obs, T, 107, 0, n_obs);
    FdConfig fd;
    const DerivativeReport hfd =
        hessian_fd(model, smp.obs, metric, id, smp.theta, fd, tight());
    counts.push_back(static_cast<double>(hfd.misfit_evals));
    exact_fd = exact_fd && hfd.misfit_evals == (p + 1) * (p + 2) / 2;
    const DerivativeReport hfa =
        hessian_fa(model, smp.obs, metric, id, smp.theta, tight());
    exact_fa = exact_fa && hfa.gradient_evals == p + 1;
  }

  // Second divided difference of the count curve = the quadratic's leading
  // coefficient; for (p+1)(p+2)/2 that is exactly 1/2.
  const double d01 = (counts[1] - counts[0]) / (ps[1] - ps[0]);
  const double d12 = (counts[2] - counts[1]) / (ps[2] - ps[1]);
  const double lead = (d12 - d01) / (ps[2] - ps[0]);
  const bool quadratic = std::abs(lead - 0.5) <= 0.1;

  std::ostringstream os;
  os << "value-based counts quadratic (leading coeff " << lead
     << ", bound 0.5+-0.1): " << (quadratic ? "yes" : "no")
     << ", counts exact: " << (exact_fd ? "yes" : "no")
     << ", gradient-based count p+1: " << (exact_fa ? "yes" : "no");
  return {quadratic && exact_fd && exact_fa, os.str()};
}

// ---------------------------------------------------------------------------
// 7. Method consistency on the virus model at its reference parameters.
Outcome criterion7() {
  const HivSample smp = hiv_sample(6, 40.0, 108, 0, true);
  const DerivativeReport ga = gradient_asm(smp.model, smp.obs, smp.metric,
                                           smp.post, smp.theta, tight());
  const DerivativeReport gs = gradient_se(smp.model, smp.obs, smp.metric,
                                          smp.post, smp.theta, tight());
  const double grad_diff = rel_max(ga.gradient, gs.gradient);

  const DerivativeReport hsa = hessian_sa(smp.model, smp.obs, smp.metric,
                                          smp.post, smp.theta, tight());
  const DerivativeReport hse = hessian_se(smp.model, smp.obs, smp.metric,
                                          smp.post, smp.theta, tight());
  const double hess_diff = rel_max(hsa.hessian, hse.hessian);

  std::ostringstream os;
  os << "gradient rel diff " << grad_diff << " (bound 1e-5), Hessian rel diff "
     << hess_diff << " (bound 1e-6)";
  return {grad_diff < 1e-5 && hess_diff < 1e-6, os.str()};
}

// ---------------------------------------------------------------------------
// 8. Structural zeros and symmetry.
Outcome criterion8() {
  const int p = 3;
  const double T = 10.0;
  const ModelSpec model = make_linear_diagonal(p, T);
  const GaussianMetric metric = GaussianMetric::identity(p);
  const PostProcessor id = PostProcessor::identity(p);
  Vector th(p);
  th << -0.4, -0.8, -1.1;
  const std::vector<double> times = {2.0, 5.0, 8.0};

  // (a) Data from the solver's own trajectory: residuals are exactly zero,
  // so the gradient and the whole dual state must vanish.
  const RhsFn rhs = [&model, &th](double t, const Vector& u, Vector& du) {
    du = model.rhs(t, u, th);
  };
  const IntegrationResult fwd =
      integrate(rhs, model.init_state(th), 0.0, T, times, tight());
  Matrix clean(3, p);
  for (int i = 0; i < 3; ++i)
    clean.row(i) = fwd.node_states[static_cast<std::size_t>(i) + 1].transpose();
  const ObservationSet zero_obs(times, clean);

  const double g_asm = gradient_asm(model, zero_obs, metric, id, th, tight())
                           .gradient.cwiseAbs()
                           .maxCoeff();
  const double g_se = gradient_se(model, zero_obs, metric, id, th, tight())
                          .gradient.cwiseAbs()
                          .maxCoeff();
  const AdjointSolution adj =
      solve_adjoint(model, zero_obs, metric, id, th, fwd.trajectory, tight());
  double v_max = adj.v0.cwiseAbs().maxCoeff();
  for (double t : {0.5, 2.0, 4.4, 7.0, 9.5})
    v_max = std::max(v_max, adj.evaluate(t).cwiseAbs().maxCoeff());
  const bool zeros_ok = g_asm <= 1e-10 && g_se <= 1e-10 && v_max <= 1e-10;

  // (b) A model that never reads theta has identically zero sensitivities
  // and gradient, whatever the data say.
  ModelSpec frozen;
  frozen.name = "frozen";
  frozen.state_dim = 2;
  frozen.param_dim = 2;
  frozen.horizon = T;
  frozen.rhs = [](double, const Vector& u, const Vector&) -> Vector {
    return -u;
  };
  frozen.jac_state = [](double, const Vector&, const Vector&) -> Matrix {
    return -Matrix::Identity(2, 2);
  };
  frozen.jac_params = [](double, const Vector&, const Vector&) -> Matrix {
    return Matrix::Zero(2, 2);
  };
  frozen.hess_params_params = [](double, const Vector&, const Vector&,
                                 const Vector&, const Vector&) -> Vector {
    return Vector::Zero(2);
  };
  frozen.hess_params_state = [](double, const Vector&, const Vector&,
                                const Vector&, const Vector&) -> Vector {
    return Vector::Zero(2);
  };
  frozen.hess_state_state = [](double, const Vector&, const Vector&,
                               const Vector&, const Vector&) -> Vector {
    return Vector::Zero(2);
  };
  frozen.init_state = [](const Vector&) -> Vector {
    Vector u0(2);
    u0 << 2.0, 1.0;
    return u0;
  };
  frozen.init_jac = [](const Vector&) -> Matrix { return Matrix::Zero(2, 2); };
  frozen.init_hess = [](const Vector&, const Vector&, const Vector&) -> Vector {
    return Vector::Zero(2);
  };

  Matrix some_data(2, 2);
  some_data << 1.0, 0.5, 0.25, 0.125;
  const ObservationSet frozen_obs({3.0, 6.0}, some_data);
  const GaussianMetric m2 = GaussianMetric::identity(2);
  const PostProcessor id2 = PostProcessor::identity(2);
  Vector th2(2);
  th2 << 0.7, -0.2;
  const SensitivitySolution sens =
      solve_sensitivities(frozen, th2, frozen_obs.times(), tight());
  double s_max = 0.0;
  for (int k = 0; k < 2; ++k)
    s_max = std::max(s_max, sens.s_nodes(k).cwiseAbs().maxCoeff());
  const double g_frozen =
      gradient_asm(frozen, frozen_obs, m2, id2, th2, tight())
          .gradient.cwiseAbs()
          .maxCoeff();
  const bool frozen_ok = s_max == 0.0 && g_frozen == 0.0;

  // (c) Symmetry: the one-sweep and sensitivity Hessians are symmetric by
  // construction; the differenced one is symmetrized with small raw skew.
  const LinearSample smp = linear_sample(p, 3, T, 109, 0, 3);
  const DerivativeReport hsa =
      hessian_sa(model, smp.obs, metric, id, smp.theta, tight());
  const DerivativeReport hse =
      hessian_se(model, smp.obs, metric, id, smp.theta, tight());
  FdStep step{1e-3, 1.0};
  const DerivativeReport hfa =
      hessian_fa(model, smp.obs, metric, id, smp.theta, step, tight());
  const double sym_sa =
      (hsa.hessian - hsa.hessian.transpose()).cwiseAbs().maxCoeff();
  const double sym_se =
      (hse.hessian - hse.hessian.transpose()).cwiseAbs().maxCoeff();
  const double sym_fa =
      (hfa.hessian - hfa.hessian.transpose()).cwiseAbs().maxCoeff();
  const bool sym_ok = sym_sa <= 1e-10 && sym_se <= 1e-10 && sym_fa <= 1e-10 &&
                      hfa.hessian_asymmetry <= 1e-6;

  std::ostringstream os;
  os << "zero-residual max |g| " << std::max(g_asm, g_se) << ", |v| " << v_max
     << "; frozen-model zeros exact: " << (frozen_ok ? "yes" : "no")
     << "; raw differencing skew " << hfa.hessian_asymmetry << " (bound 1e-6)";
  return {zeros_ok && frozen_ok && sym_ok, os.str()};
}

// ---------------------------------------------------------------------------
// 9. Smoothing the measurement pulses converges to the jump formulation.
Outcome criterion9() {
  const int p = 3;
  const double T = 20.0;
  const ModelSpec model = make_linear_diagonal(p, T);
  const GaussianMetric metric = GaussianMetric::identity(p);
  const PostProcessor id = PostProcessor::identity(p);
  const LinearSample smp = linear_sample(p, 4, T, 110, 0, 4);

  const DerivativeReport exact =
      gradient_asm(model, smp.obs, metric, id, smp.theta, tight());
  const double gap = smp.obs.min_gap();

  std::vector<double> errs;
  std::vector<long> evals;
  for (double f : {1e-1, 1e-2, 1e-3}) {
    const DerivativeReport sm = gradient_smoothed(model, smp.obs, metric, id,
                                                  smp.theta, f * gap, tight());
    errs.push_back(rel_max(sm.gradient, exact.gradient));
    evals.push_back(sm.rhs_evals);
  }
  const bool err_monotone = errs[0] > errs[1] && errs[1] > errs[2];
  const bool cost_monotone = evals[0] < evals[1] && evals[1] < evals[2];

  std::ostringstream os;
  os << "errors " << errs[0] << " > " << errs[1] << " > " << errs[2]
     << ": " << (err_monotone ? "yes" : "no") << "; evals " << evals[0]
     << " < " << evals[1] << " < " << evals[2] << ": "
     << (cost_monotone ? "yes" : "no");
  return {err_monotone && cost_monotone, os.str()};
}

// ---------------------------------------------------------------------------
// 10. A campaign with wall-time recording off is byte-reproducible.
Outcome criterion10() {
  ExperimentConfig cfg;
  cfg.model = "linear";
  cfg.p_schedule = {2, 3};
  cfg.n_obs_schedule = {3};
  cfg.samples = 2;
  cfg.seed = 17;
  cfg.methods = {"se", "asm", "fd"};
  cfg.targets = {"gradient"};
  cfg.record_wall_time = false;

  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  cfg.output_prefix = "acceptance_repro_a";
  run_experiment(cfg);
  cfg.output_prefix = "acceptance_repro_b";
  run_experiment(cfg);

  const std::string csv_a = slurp("acceptance_repro_a.csv");
  const std::string csv_b = slurp("acceptance_repro_b.csv");
  const std::string json_a = slurp("acceptance_repro_a.json");
  const std::string json_b = slurp("acceptance_repro_b.json");
  for (const char* f : {"acceptance_repro_a.csv", "acceptance_repro_b.csv",
                        "acceptance_repro_a.json", "acceptance_repro_b.json"})
    std::remove(f);

  const bool same = !csv_a.empty() && csv_a == csv_b && json_a == json_b;
  std::ostringstream os;
  os << "CSV bytes " << csv_a.size() << " vs " << csv_b.size() << ", identical: "
     << (same ? "yes" : "no");
  return {same, os.str()};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--criterion N]\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "gradient accuracy vs closed form", 30.0, criterion1},
      {2, "one-sweep Hessian accuracy", 60.0, criterion2},
      {3, "differenced-gradient Hessian accuracy", 120.0, criterion3},
      {4, "gradient cost scaling in p", 300.0, criterion4},
      {5, "cost scaling in measurement count", 300.0, criterion5},
      {6, "evaluation-count laws", 120.0, criterion6},
      {7, "virus-model method consistency", 120.0, criterion7},
      {8, "structural zeros and symmetry", 30.0, criterion8},
      {9, "smoothed-pulse convergence", 60.0, criterion9},
      {10, "byte-reproducible campaigns", 30.0, criterion10},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (selected != 0 && c.id != selected) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const bool in_budget = secs < c.budget_seconds;
    const bool pass = out.pass && in_budget;
    if (!pass) ++failures;
    std::printf("[%s] C%d: %s: %s (%.1fs of %.0fs budget)\n",
                pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs,
                c.budget_seconds);
  }
  return failures;
}
