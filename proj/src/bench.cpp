#include "odelik/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "odelik/adjoint.hpp"
#include "odelik/fd.hpp"
#include "odelik/forward_sens.hpp"

namespace odelik {

namespace {

const std::set<std::string> kGradientMethods = {"fd", "se", "asm", "smoothed"};
const std::set<std::string> kHessianMethods = {"fd", "se", "sa", "fa"};

bool method_supports(const std::string& method, const std::string& target) {
  return target == "gradient" ? kGradientMethods.count(method) > 0
                              : kHessianMethods.count(method) > 0;
}

double max_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}
double max_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double relative_error(const Vector& x, const Vector& ref) {
  const double scale = max_norm(ref);
  const double diff = max_norm(Vector(x - ref));
  return scale > 0 ? diff / scale : diff;
}
double relative_error(const Matrix& x, const Matrix& ref) {
  const double scale = max_norm(ref);
  const double diff = max_norm(Matrix(x - ref));
  return scale > 0 ? diff / scale : diff;
}

}  // namespace

Vector sample_linear_params(int p, SplitMix64& rng) {
  Vector th(p);
  for (int i = 0; i < p; ++i) th[i] = rng.uniform(-1.1, -0.1);
  return th;
}

Matrix perturb_data(const Matrix& clean, SplitMix64& rng) {
  const double width = 0.1 * std::max(clean.maxCoeff(), 0.0);
  Matrix out = clean;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out(i, j) += rng.uniform(0.0, width);
  return out;
}

Vector sample_hiv_params(const Vector& theta0, SplitMix64& rng) {
  hiv_check_params(theta0);
  Vector th(theta0.size());
  for (Eigen::Index i = 0; i < th.size(); ++i)
    th[i] = theta0[i] * rng.uniform(0.95, 1.05);
  // Efficacies stay strictly below 1.
  th[9] = std::min(th[9], 0.999);
  th[10] = std::min(th[10], 0.999);
  return th;
}

std::vector<double> observation_times(int n_obs, double horizon) {
  if (n_obs < 1) throw std::invalid_argument("observation_times: n_obs >= 1");
  std::vector<double> t(static_cast<std::size_t>(n_obs));
  for (int i = 1; i <= n_obs; ++i)
    t[static_cast<std::size_t>(i - 1)] = horizon * i / (n_obs + 1);
  return t;
}

void ExperimentConfig::validate() const {
  if (model != "linear" && model != "hiv")
    throw std::invalid_argument("config: model must be 'linear' or 'hiv'");
  if (!(horizon > 0) || !std::isfinite(horizon))
    throw std::invalid_argument("config: horizon must be positive");
  if (samples < 1) throw std::invalid_argument("config: samples must be >= 1");
  if (model == "linear") {
    if (p_schedule.empty())
      throw std::invalid_argument("config: p_schedule must not be empty");
    for (int p : p_schedule)
      if (p < 1) throw std::invalid_argument("config: p values must be >= 1");
  }
  if (n_obs_schedule.empty())
    throw std::invalid_argument("config: n_obs_schedule must not be empty");
  for (int n : n_obs_schedule)
    if (n < 1) throw std::invalid_argument("config: n_obs values must be >= 1");
  if (targets.empty())
    throw std::invalid_argument("config: targets must not be empty");
  for (const auto& t : targets)
    if (t != "gradient" && t != "hessian")
      throw std::invalid_argument("config: unknown target '" + t + "'");
  if (methods.empty())
    throw std::invalid_argument("config: methods must not be empty");
  for (const auto& m : methods) {
    if (kGradientMethods.count(m) == 0 && kHessianMethods.count(m) == 0)
      throw std::invalid_argument("config: unknown method '" + m + "'");
    bool used = false;
    for (const auto& t : targets) used = used || method_supports(m, t);
    if (!used)
      throw std::invalid_argument("config: method '" + m +
                                  "' supports none of the requested targets");
  }
  if (!(rtol > 0) || !(atol > 0))
    throw std::invalid_argument("config: tolerances must be positive");
  if (reference != "auto" && reference != "exact" && reference != "se" &&
      reference != "sa")
    throw std::invalid_argument("config: unknown reference '" + reference + "'");
  if (reference == "exact" && model != "linear")
    throw std::invalid_argument(
        "config: the exact reference exists only for the linear model");
  if (!(smoothed_sigma_factor > 0))
    throw std::invalid_argument("config: smoothed_sigma_factor must be positive");
  if (fd_scale && !(*fd_scale > 0))
    throw std::invalid_argument("config: fd_scale must be positive");
  if (fa_scale && !(*fa_scale > 0))
    throw std::invalid_argument("config: fa_scale must be positive");
  if (!(fd_floor >= 0) || !(fa_floor >= 0))
    throw std::invalid_argument("config: step floors must be nonnegative");
  if (model == "hiv") {
    if (hiv_theta0.size() > 0) hiv_check_params(hiv_theta0);
    if (hiv_u0.size() > 0 && hiv_u0.size() != 5)
      throw std::invalid_argument("config: hiv_u0 must have length 5");
  }
  if (output_prefix.empty())
    throw std::invalid_argument("config: output_prefix must not be empty");
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config: invalid JSON in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config: top level must be an object");

  static const std::set<std::string> known = {
      "model",          "p_schedule",     "n_obs_schedule",
      "horizon",        "samples",        "seed",
      "methods",        "targets",        "rtol",
      "atol",           "reference",      "record_wall_time",
      "smoothed_sigma_factor",            "fd_scale",
      "fa_scale",       "fd_floor",       "fa_floor",
      "hiv_theta0",     "hiv_u0",         "output_prefix"};
  for (const auto& [key, _] : j.items()) {
    if (known.count(key) == 0)
      throw std::runtime_error("config: unknown key '" + key + "'");
  }

  ExperimentConfig c;
  try {
    if (j.contains("model")) c.model = j["model"].get<std::string>();
    if (j.contains("p_schedule"))
      c.p_schedule = j["p_schedule"].get<std::vector<int>>();
    if (j.contains("n_obs_schedule"))
      c.n_obs_schedule = j["n_obs_schedule"].get<std::vector<int>>();
    if (j.contains("horizon")) c.horizon = j["horizon"].get<double>();
    if (j.contains("samples")) c.samples = j["samples"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("methods"))
      c.methods = j["methods"].get<std::vector<std::string>>();
    if (j.contains("targets"))
      c.targets = j["targets"].get<std::vector<std::string>>();
    if (j.contains("rtol")) c.rtol = j["rtol"].get<double>();
    if (j.contains("atol")) c.atol = j["atol"].get<double>();
    if (j.contains("reference")) c.reference = j["reference"].get<std::string>();
    if (j.contains("record_wall_time"))
      c.record_wall_time = j["record_wall_time"].get<bool>();
    if (j.contains("smoothed_sigma_factor"))
      c.smoothed_sigma_factor = j["smoothed_sigma_factor"].get<double>();
    if (j.contains("fd_scale")) c.fd_scale = j["fd_scale"].get<double>();
    if (j.contains("fa_scale")) c.fa_scale = j["fa_scale"].get<double>();
    if (j.contains("fd_floor")) c.fd_floor = j["fd_floor"].get<double>();
    if (j.contains("fa_floor")) c.fa_floor = j["fa_floor"].get<double>();
    if (j.contains("hiv_theta0")) {
      const auto v = j["hiv_theta0"].get<std::vector<double>>();
      c.hiv_theta0 = Eigen::Map<const Vector>(v.data(),
                                              static_cast<Eigen::Index>(v.size()));
    }
    if (j.contains("hiv_u0")) {
      const auto v = j["hiv_u0"].get<std::vector<double>>();
      c.hiv_u0 =
          Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    if (j.contains("output_prefix"))
      c.output_prefix = j["output_prefix"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("config: type error: ") + e.what());
  }
  c.validate();
  return c;
}

namespace {

struct Instance {
  ModelSpec model;
  ObservationSet obs;
  GaussianMetric metric;
  PostProcessor post;
  Vector theta;
};

Instance make_instance(const ExperimentConfig& cfg, int p, int n_obs,
                       int sample, const SolverConfig& solver) {
  SplitMix64 rng(SplitMix64::derive(cfg.seed, static_cast<std::uint64_t>(p),
                                    static_cast<std::uint64_t>(n_obs),
                                    static_cast<std::uint64_t>(sample)));
  const std::vector<double> times = observation_times(n_obs, cfg.horizon);

  if (cfg.model == "linear") {
    ModelSpec model = make_linear_diagonal(p, cfg.horizon);
    Vector theta = sample_linear_params(p, rng);
    Matrix clean(n_obs, p);
    for (int i = 0; i < n_obs; ++i)
      for (int k = 0; k < p; ++k)
        clean(i, k) = std::exp(theta[k] * times[static_cast<std::size_t>(i)]);
    Matrix data = perturb_data(clean, rng);
    return Instance{std::move(model),
                    ObservationSet(times, std::move(data)),
                    GaussianMetric::identity(p),
                    PostProcessor::identity(p),
                    std::move(theta)};
  }

  // HIV: clean data comes from a forward solve at the campaign tolerances.
  const Vector theta0 =
      cfg.hiv_theta0.size() > 0 ? cfg.hiv_theta0 : hiv_reference_params();
  const Vector u0 = cfg.hiv_u0.size() > 0 ? cfg.hiv_u0 : hiv_default_init_state();
  ModelSpec model = make_hiv(u0, cfg.horizon);
  Vector theta = sample_hiv_params(theta0, rng);
  PostProcessor post(hiv_observation_matrix());

  RhsFn rhs = [&model, &theta](double t, const Vector& u, Vector& du) {
    du = model.rhs(t, u, theta);
  };
  IntegrationResult fwd = integrate(rhs, model.init_state(theta), 0.0,
                                    model.horizon, times, solver, nullptr,
                                    DenseStorage::NodesOnly);
  Matrix clean(n_obs, 2);
  for (int i = 0; i < n_obs; ++i)
    clean.row(i) =
        (post.P * fwd.node_states[static_cast<std::size_t>(i) + 1]).transpose();
  Matrix data = perturb_data(clean, rng);
  return Instance{std::move(model), ObservationSet(times, std::move(data)),
                  GaussianMetric::identity(2), std::move(post),
                  std::move(theta)};
}

struct Reference {
  std::string tag;
  Vector gradient;
  Matrix hessian;
};

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  SolverConfig solver;
  solver.rtol = cfg.rtol;
  solver.atol = cfg.atol;

  FdConfig fd;
  fd.scale = cfg.fd_scale;
  fd.floor = cfg.fd_floor;

  const std::vector<int> p_list =
      cfg.model == "hiv" ? std::vector<int>{11} : cfg.p_schedule;

  std::vector<ResultRow> rows;
  for (int p : p_list) {
    for (int n_obs : cfg.n_obs_schedule) {
      for (int sample = 0; sample < cfg.samples; ++sample) {
        const Instance inst =
            make_instance(cfg, p, n_obs, sample, solver);
        const double sigma = cfg.smoothed_sigma_factor * inst.obs.min_gap();
        FdStep fa_step = FdStep::first_difference(solver);
        if (cfg.fa_scale) fa_step.scale = *cfg.fa_scale;
        fa_step.floor = cfg.fa_floor;

        for (const std::string& target : cfg.targets) {
          // Reference per (sample, target), shared by all methods.
          Reference ref;
          std::string ref_method = cfg.reference;
          if (ref_method == "auto")
            ref_method = cfg.model == "linear" ? "exact" : "se";
          if (target == "gradient" && ref_method == "sa") ref_method = "se";
          ref.tag = ref_method;
          try {
            if (ref_method == "exact") {
              if (target == "gradient")
                ref.gradient = -exact_gradient_linear(
                    inst.theta, inst.obs.times(), inst.obs.values());
              else
                ref.hessian = -exact_hessian_linear(
                    inst.theta, inst.obs.times(), inst.obs.values());
            } else if (ref_method == "se") {
              if (target == "gradient")
                ref.gradient = gradient_se(inst.model, inst.obs, inst.metric,
                                           inst.post, inst.theta, solver)
                                   .gradient;
              else
                ref.hessian = hessian_se(inst.model, inst.obs, inst.metric,
                                         inst.post, inst.theta, solver)
                                  .hessian;
            } else {  // "sa", hessian only
              ref.hessian = hessian_sa(inst.model, inst.obs, inst.metric,
                                       inst.post, inst.theta, solver)
                                .hessian;
            }
          } catch (const IntegrationError& e) {
            // Reference unavailable: record every method row as failed.
            for (const std::string& method : cfg.methods) {
              if (!method_supports(method, target)) continue;
              ResultRow row{cfg.model, method, target, p, n_obs, sample,
                            0.0,      0,      ref.tag, std::nan(""),
                            std::string("ref_") + to_string(e.kind())};
              rows.push_back(std::move(row));
            }
            continue;
          }

          for (const std::string& method : cfg.methods) {
            if (!method_supports(method, target)) continue;
            ResultRow row;
            row.model = cfg.model;
            row.method = method;
            row.target = target;
            row.p = p;
            row.n_obs = n_obs;
            row.sample = sample;
            row.ref = ref.tag;
            try {
              const auto t0 = std::chrono::steady_clock::now();
              DerivativeReport rep;
              if (target == "gradient") {
                if (method == "fd")
                  rep = gradient_fd(inst.model, inst.obs, inst.metric,
                                    inst.post, inst.theta, fd, solver);
                else if (method == "se")
                  rep = gradient_se(inst.model, inst.obs, inst.metric,
                                    inst.post, inst.theta, solver);
                else if (method == "asm")
                  rep = gradient_asm(inst.model, inst.obs, inst.metric,
                                     inst.post, inst.theta, solver);
                else
                  rep = gradient_smoothed(inst.model, inst.obs, inst.metric,
                                          inst.post, inst.theta, sigma, solver);
              } else {
                if (method == "fd")
                  rep = hessian_fd(inst.model, inst.obs, inst.metric, inst.post,
                                   inst.theta, fd, solver);
                else if (method == "se")
                  rep = hessian_se(inst.model, inst.obs, inst.metric, inst.post,
                                   inst.theta, solver);
                else if (method == "sa")
                  rep = hessian_sa(inst.model, inst.obs, inst.metric, inst.post,
                                   inst.theta, solver);
                else
                  rep = hessian_fa(inst.model, inst.obs, inst.metric, inst.post,
                                   inst.theta, fa_step, solver);
              }
              const auto t1 = std::chrono::steady_clock::now();
              row.seconds =
                  cfg.record_wall_time
                      ? std::chrono::duration<double>(t1 - t0).count()
                      : 0.0;
              row.rhs_evals = rep.rhs_evals;
              row.rel_err = target == "gradient"
                                ? relative_error(rep.gradient, ref.gradient)
                                : relative_error(rep.hessian, ref.hessian);
              row.status = "ok";
            } catch (const IntegrationError& e) {
              row.seconds = 0.0;
              row.rhs_evals = 0;
              row.rel_err = std::nan("");
              row.status = to_string(e.kind());
            }
            rows.push_back(std::move(row));
          }
        }
      }
    }
  }

  write_csv(rows, cfg.output_prefix + ".csv");
  write_summary_json(cfg, rows, cfg.output_prefix + ".json");
  return rows;
}

void write_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot write " + path);
  out << "model,method,target,p,n_obs,sample,seconds,rhs_evals,ref,rel_err,status\n";
  char buf[64];
  for (const ResultRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.6f", r.seconds);
    out << r.model << ',' << r.method << ',' << r.target << ',' << r.p << ','
        << r.n_obs << ',' << r.sample << ',' << buf << ',' << r.rhs_evals
        << ',' << r.ref << ',';
    if (std::isnan(r.rel_err)) {
      out << "nan";
    } else {
      std::snprintf(buf, sizeof(buf), "%.12e", r.rel_err);
      out << buf;
    }
    out << ',' << r.status << '\n';
  }
}

double exact_quantile(std::vector<double> values, double q) {
  if (values.empty())
    throw std::invalid_argument("exact_quantile: no values");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<long>(values.size());
  long k = static_cast<long>(std::ceil(q * static_cast<double>(n)));
  k = std::clamp(k, 1L, n);
  return values[static_cast<std::size_t>(k - 1)];
}

void write_summary_json(const ExperimentConfig& cfg,
                        const std::vector<ResultRow>& rows,
                        const std::string& path) {
  using json = nlohmann::ordered_json;
  json root;
  root["model"] = cfg.model;
  root["seed"] = cfg.seed;
  root["samples"] = cfg.samples;
  root["rtol"] = cfg.rtol;
  root["atol"] = cfg.atol;
  root["reference"] = cfg.reference;
  root["quantile_rule"] =
      "sorted value at 1-based index ceil(q*n), computed over ok rows";
  root["cells"] = json::array();

  // Group rows by (p, n_obs, target, method), preserving first appearance.
  struct Key {
    int p, n_obs;
    std::string target, method;
    bool operator<(const Key& o) const {
      return std::tie(p, n_obs, target, method) <
             std::tie(o.p, o.n_obs, o.target, o.method);
    }
  };
  std::vector<Key> order;
  std::set<Key> seen;
  for (const auto& r : rows) {
    Key k{r.p, r.n_obs, r.target, r.method};
    if (seen.insert(k).second) order.push_back(k);
  }
  for (const Key& k : order) {
    std::vector<double> err, secs, evals;
    int failed = 0;
    std::string ref_tag;
    for (const auto& r : rows) {
      if (r.p != k.p || r.n_obs != k.n_obs || r.target != k.target ||
          r.method != k.method)
        continue;
      ref_tag = r.ref;
      if (r.status != "ok") {
        ++failed;
        continue;
      }
      err.push_back(r.rel_err);
      secs.push_back(r.seconds);
      evals.push_back(static_cast<double>(r.rhs_evals));
    }
    json cell;
    cell["p"] = k.p;
    cell["n_obs"] = k.n_obs;
    cell["target"] = k.target;
    cell["method"] = k.method;
    cell["ref"] = ref_tag;
    cell["ok"] = static_cast<int>(err.size());
    cell["failed"] = failed;
    auto stats = [](const std::vector<double>& v) {
      json s;
      if (v.empty()) return s;
      s["median"] = exact_quantile(v, 0.5);
      s["q025"] = exact_quantile(v, 0.025);
      s["q975"] = exact_quantile(v, 0.975);
      return s;
    };
    cell["rel_err"] = stats(err);
    cell["seconds"] = stats(secs);
    cell["rhs_evals"] = stats(evals);
    root["cells"].push_back(std::move(cell));
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_summary_json: cannot write " + path);
  out << root.dump(2) << "\n";
}

}  // namespace odelik
