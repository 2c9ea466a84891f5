#include "odelik/forward_sens.hpp"

#include <cmath>

namespace odelik {

SensitivitySolution solve_sensitivities(const ModelSpec& model,
                                        const Vector& theta,
                                        const std::vector<double>& stops,
                                        const SolverConfig& cfg,
                                        DenseStorage storage) {
  model.validate();
  model.check_params(theta);
  const int m = model.state_dim;
  const int p = model.param_dim;
  const int n = m * (1 + p);

  RhsFn rhs = [&model, &theta, m, p](double t, const Vector& y, Vector& dy) {
    const Vector u = y.head(m);
    const auto S = Eigen::Map<const Matrix>(y.data() + m, m, p);
    dy.head(m) = model.rhs(t, u, theta);
    auto dS = Eigen::Map<Matrix>(dy.data() + m, m, p);
    dS = model.jac_state(t, u, theta) * S + model.jac_params(t, u, theta);
  };

  Vector y0(n);
  y0.head(m) = model.init_state(theta);
  Eigen::Map<Matrix>(y0.data() + m, m, p) = model.init_jac(theta);

  IntegrationResult r =
      integrate(rhs, y0, 0.0, model.horizon, stops, cfg, nullptr, storage);

  SensitivitySolution out;
  out.m = m;
  out.p = p;
  out.node_times = r.node_times;
  const auto n_nodes = static_cast<Eigen::Index>(r.node_times.size());
  out.base_nodes.resize(m, n_nodes);
  out.dir_nodes.assign(static_cast<std::size_t>(p), Matrix(m, n_nodes));
  for (Eigen::Index j = 0; j < n_nodes; ++j) {
    const Vector& y = r.node_states[static_cast<std::size_t>(j)];
    out.base_nodes.col(j) = y.head(m);
    for (int k = 0; k < p; ++k)
      out.dir_nodes[static_cast<std::size_t>(k)].col(j) =
          y.segment(m + k * m, m);
  }
  if (storage == DenseStorage::Full) {
    out.base = r.trajectory.slice(0, m);
    out.directions.reserve(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k)
      out.directions.push_back(r.trajectory.slice(m + k * m, m));
  }
  out.steps = r.stats;
  out.model_rhs_evals = r.stats.rhs_calls * (1 + p);
  return out;
}

DerivativeReport gradient_se(const ModelSpec& model, const ObservationSet& obs,
                             const GaussianMetric& metric,
                             const PostProcessor& P, const Vector& theta,
                             const SolverConfig& cfg) {
  check_problem(model, obs, metric, P, theta);
  SensitivitySolution sens = solve_sensitivities(model, theta, obs.times(), cfg,
                                                 DenseStorage::NodesOnly);
  DerivativeReport rep;
  rep.method = "se";
  rep.gradient = Vector::Zero(model.param_dim);
  for (int i = 0; i < obs.size(); ++i) {
    const Eigen::Index node = i + 1;  // node 0 is t = 0
    const Vector du =
        metric.distance_grad_state(P, obs.value(i), sens.base_nodes.col(node));
    for (int k = 0; k < model.param_dim; ++k)
      rep.gradient[k] += du.dot(sens.s_nodes(k).col(node));
  }
  rep.steps = sens.steps;
  rep.rhs_evals = sens.model_rhs_evals;
  return rep;
}

int SecondSensitivitySolution::pair_index(int k, int l) const {
  if (k > l) std::swap(k, l);
  return k * p - k * (k - 1) / 2 + (l - k);
}

SecondSensitivitySolution solve_second_sensitivities(
    const ModelSpec& model, const Vector& theta, const SensitivitySolution& sens,
    const std::vector<double>& stops, const SolverConfig& cfg,
    DenseStorage storage) {
  model.validate();
  model.check_params(theta);
  if (sens.base.empty())
    throw std::invalid_argument(
        "solve_second_sensitivities: needs a sensitivity solution with dense "
        "storage");
  const int m = model.state_dim;
  const int p = model.param_dim;

  SecondSensitivitySolution out;
  out.m = m;
  out.p = p;

  Vector ek = Vector::Zero(p), el = Vector::Zero(p);
  Vector u(m), sk(m), sl(m);

  for (int k = 0; k < p; ++k) {
    ek.setZero();
    ek[k] = 1.0;
    for (int l = k; l < p; ++l) {
      el.setZero();
      el[l] = 1.0;
      RhsFn rhs = [&](double t, const Vector& z, Vector& dz) {
        sens.base.evaluate_into(t, u);
        sens.directions[static_cast<std::size_t>(k)].evaluate_into(t, sk);
        sens.directions[static_cast<std::size_t>(l)].evaluate_into(t, sl);
        dz = model.hess_params_params(t, u, theta, ek, el) +
             model.hess_params_state(t, u, theta, ek, sl) +
             model.hess_params_state(t, u, theta, el, sk) +
             model.hess_state_state(t, u, theta, sk, sl) +
             model.jac_state(t, u, theta) * z;
      };
      const Vector z0 = model.init_hess(theta, ek, el);
      IntegrationResult r =
          integrate(rhs, z0, 0.0, model.horizon, stops, cfg, nullptr, storage);

      if (out.node_times.empty()) {
        out.node_times = r.node_times;
        out.pair_nodes.reserve(static_cast<std::size_t>(p * (p + 1) / 2));
        if (storage == DenseStorage::Full)
          out.pairs.reserve(static_cast<std::size_t>(p * (p + 1) / 2));
      }
      Matrix nodes(m, static_cast<Eigen::Index>(r.node_times.size()));
      for (Eigen::Index j = 0; j < nodes.cols(); ++j)
        nodes.col(j) = r.node_states[static_cast<std::size_t>(j)];
      out.pair_nodes.push_back(std::move(nodes));
      if (storage == DenseStorage::Full)
        out.pairs.push_back(std::move(r.trajectory));
      out.steps += r.stats;
    }
  }
  out.model_rhs_evals = out.steps.rhs_calls;
  return out;
}

DerivativeReport hessian_se(const ModelSpec& model, const ObservationSet& obs,
                            const GaussianMetric& metric,
                            const PostProcessor& P, const Vector& theta,
                            const SolverConfig& cfg) {
  check_problem(model, obs, metric, P, theta);
  const int p = model.param_dim;

  SensitivitySolution sens =
      solve_sensitivities(model, theta, obs.times(), cfg, DenseStorage::Full);
  SecondSensitivitySolution second = solve_second_sensitivities(
      model, theta, sens, obs.times(), cfg, DenseStorage::NodesOnly);

  const Matrix duu = metric.distance_hess_state(P);

  DerivativeReport rep;
  rep.method = "se";
  rep.gradient = Vector::Zero(p);
  rep.hessian = Matrix::Zero(p, p);
  for (int i = 0; i < obs.size(); ++i) {
    const Eigen::Index node = i + 1;
    const Vector du =
        metric.distance_grad_state(P, obs.value(i), sens.base_nodes.col(node));
    for (int k = 0; k < p; ++k) {
      rep.gradient[k] += du.dot(sens.s_nodes(k).col(node));
      const Vector duu_sk = duu * sens.s_nodes(k).col(node);
      for (int l = k; l < p; ++l) {
        const double point = duu_sk.dot(sens.s_nodes(l).col(node));
        const auto& pair_nodes =
            second.pair_nodes[static_cast<std::size_t>(second.pair_index(k, l))];
        const double curve = du.dot(pair_nodes.col(node));
        rep.hessian(k, l) += point + curve;
      }
    }
  }
  for (int k = 0; k < p; ++k)
    for (int l = k + 1; l < p; ++l) rep.hessian(l, k) = rep.hessian(k, l);
  rep.steps = sens.steps;
  rep.steps += second.steps;
  rep.rhs_evals = sens.model_rhs_evals + second.model_rhs_evals;
  rep.hessian_asymmetry = 0.0;  // assembled once per unordered pair
  return rep;
}

}  // namespace odelik
