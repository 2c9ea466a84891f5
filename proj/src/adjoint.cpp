#include "odelik/adjoint.hpp"

#include <cmath>
#include <stdexcept>

#include "odelik/quadrature.hpp"

namespace odelik {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

long model_equivalents(long calls, int sys_dim, int m) {
  return std::lround(static_cast<double>(calls) *
                     (static_cast<double>(sys_dim) / m));
}

// Piecewise-linear curve through (t_i, y_i), constant beyond the ends.
class DataInterpolant {
 public:
  explicit DataInterpolant(const ObservationSet& obs) : obs_(obs) {}

  void evaluate_into(double t, Vector& out) const {
    const auto& ts = obs_.times();
    if (t <= ts.front()) {
      out = obs_.value(0);
      return;
    }
    if (t >= ts.back()) {
      out = obs_.value(obs_.size() - 1);
      return;
    }
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const int i = static_cast<int>(it - ts.begin());  // t in [t_{i-1}, t_i)
    const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
    out = (1.0 - w) * obs_.value(i - 1) + w * obs_.value(i);
  }

 private:
  const ObservationSet& obs_;
};

}  // namespace

Vector AdjointSolution::evaluate(double t) const {
  if (segments.empty())
    throw std::logic_error(
        "AdjointSolution: solved without dense storage, no trajectory kept");
  // Prefer the earlier leg at a shared boundary: its value carries the jump.
  for (const auto& seg : segments) {
    if (t <= seg.span_hi()) {
      if (t < seg.span_lo()) break;
      return seg.evaluate(t);
    }
  }
  throw std::out_of_range("AdjointSolution: t outside [0, T]");
}

AdjointSolution solve_adjoint(const ModelSpec& model, const ObservationSet& obs,
                              const GaussianMetric& metric,
                              const PostProcessor& P, const Vector& theta,
                              const DenseTrajectory& forward,
                              const SolverConfig& cfg, DenseStorage storage) {
  check_problem(model, obs, metric, P, theta);
  if (forward.empty() || forward.span_lo() > 0.0 ||
      forward.span_hi() < model.horizon)
    throw std::invalid_argument(
        "solve_adjoint: forward trajectory must cover [0, horizon]");

  const int m = model.state_dim;
  const int p = model.param_dim;
  const int n_obs = obs.size();

  AdjointSolution out;
  out.jump_times = obs.times();
  out.jumps.resize(static_cast<std::size_t>(n_obs));
  out.quadratures = Vector::Zero(p);

  Vector u_buf(m);
  RhsFn backward_rhs = [&](double t, const Vector& v, Vector& dv) {
    forward.evaluate_into(t, u_buf);
    dv.noalias() = -model.jac_state(t, u_buf, theta).transpose() * v;
  };
  QuadratureSpec quad;
  quad.dim = p;
  quad.integrand = [&](double t, const Vector& v, Eigen::Ref<Vector> g) {
    forward.evaluate_into(t, u_buf);
    g.noalias() = model.jac_params(t, u_buf, theta).transpose() * v;
  };

  std::vector<DenseTrajectory> legs;
  legs.reserve(static_cast<std::size_t>(n_obs) + 1);

  Vector v = Vector::Zero(m);
  double t_hi = model.horizon;
  for (int i = n_obs; i >= 0; --i) {
    const double t_lo = i > 0 ? obs.times()[static_cast<std::size_t>(i - 1)] : 0.0;
    IntegrationResult leg =
        integrate(backward_rhs, v, t_hi, t_lo, {}, cfg, &quad, storage);
    out.steps += leg.stats;
    out.backward_accepted += leg.stats.accepted;
    // The leg ran from t_hi down to t_lo: its channel integral carries the
    // backward orientation.
    out.quadratures -= leg.quadratures;
    if (storage == DenseStorage::Full)
      legs.push_back(std::move(leg.trajectory));
    v = leg.final_state;
    if (i > 0) {
      const Vector du = metric.distance_grad_state(
          P, obs.value(i - 1), forward.evaluate(t_lo));
      out.jumps[static_cast<std::size_t>(i - 1)] = du;
      v += du;
    }
    t_hi = t_lo;
  }
  out.v0 = v;
  if (storage == DenseStorage::Full) {
    out.segments.assign(std::make_move_iterator(legs.rbegin()),
                        std::make_move_iterator(legs.rend()));
  }
  out.model_rhs_evals = model_equivalents(out.steps.rhs_calls, m + p, m);
  return out;
}

DerivativeReport gradient_asm(const ModelSpec& model, const ObservationSet& obs,
                              const GaussianMetric& metric,
                              const PostProcessor& P, const Vector& theta,
                              const SolverConfig& cfg) {
  check_problem(model, obs, metric, P, theta);
  RhsFn rhs = [&model, &theta](double t, const Vector& u, Vector& du) {
    du = model.rhs(t, u, theta);
  };
  IntegrationResult fwd = integrate(rhs, model.init_state(theta), 0.0,
                                    model.horizon, obs.times(), cfg);
  AdjointSolution adj = solve_adjoint(model, obs, metric, P, theta,
                                      fwd.trajectory, cfg, DenseStorage::NodesOnly);

  DerivativeReport rep;
  rep.method = "asm";
  rep.gradient = model.init_jac(theta).transpose() * adj.v0 + adj.quadratures;
  rep.steps = fwd.stats;
  rep.steps += adj.steps;
  rep.backward_steps = adj.backward_accepted;
  rep.rhs_evals = fwd.stats.rhs_calls + adj.model_rhs_evals;
  return rep;
}

DerivativeReport hessian_sa(const ModelSpec& model, const ObservationSet& obs,
                            const GaussianMetric& metric,
                            const PostProcessor& P, const Vector& theta,
                            const SolverConfig& cfg) {
  check_problem(model, obs, metric, P, theta);
  const int m = model.state_dim;
  const int p = model.param_dim;
  const int n_pairs = p * (p + 1) / 2;

  SensitivitySolution sens =
      solve_sensitivities(model, theta, obs.times(), cfg, DenseStorage::Full);
  AdjointSolution adj = solve_adjoint(model, obs, metric, P, theta, sens.base,
                                      cfg, DenseStorage::Full);

  DerivativeReport rep;
  rep.method = "sa";
  rep.gradient = model.init_jac(theta).transpose() * adj.v0 + adj.quadratures;
  rep.hessian = Matrix::Zero(p, p);

  // Measurement part: Σ_i s_k(t_i)ᵀ d_uu s_l(t_i).
  const Matrix duu = metric.distance_hess_state(P);
  for (int i = 0; i < obs.size(); ++i) {
    const Eigen::Index node = i + 1;
    for (int k = 0; k < p; ++k) {
      const Vector duu_sk = duu * sens.s_nodes(k).col(node);
      for (int l = k; l < p; ++l)
        rep.hessian(k, l) += duu_sk.dot(sens.s_nodes(l).col(node));
    }
  }

  // Initial-state part: (∂²u0/∂θ∂θ)[e_k,e_l]ᵀ v(0).
  {
    Vector ek = Vector::Zero(p), el = Vector::Zero(p);
    for (int k = 0; k < p; ++k) {
      ek.setZero();
      ek[k] = 1.0;
      for (int l = k; l < p; ++l) {
        el.setZero();
        el[l] = 1.0;
        rep.hessian(k, l) += model.init_hess(theta, ek, el).dot(adj.v0);
      }
    }
  }

  // Inner products of the second-derivative contractions against v, one
  // adaptive panel sweep per backward leg (v is smooth inside each leg).
  {
    Vector u(m), v(m);
    Matrix S(m, p);
    std::vector<Vector> unit(static_cast<std::size_t>(p), Vector::Zero(p));
    for (int k = 0; k < p; ++k) unit[static_cast<std::size_t>(k)][k] = 1.0;

    for (const DenseTrajectory& leg : adj.segments) {
      auto integrand = [&](double t, Eigen::Ref<Vector> out) {
        sens.base.evaluate_into(t, u);
        leg.evaluate_into(t, v);
        for (int k = 0; k < p; ++k)
          sens.directions[static_cast<std::size_t>(k)].evaluate_into(t,
                                                                     S.col(k));
        int idx = 0;
        for (int k = 0; k < p; ++k) {
          const auto& ek = unit[static_cast<std::size_t>(k)];
          for (int l = k; l < p; ++l) {
            const auto& el = unit[static_cast<std::size_t>(l)];
            const Vector w =
                model.hess_params_params(t, u, theta, ek, el) +
                model.hess_params_state(t, u, theta, ek, S.col(l)) +
                model.hess_params_state(t, u, theta, el, S.col(k)) +
                model.hess_state_state(t, u, theta, S.col(k), S.col(l));
            out[idx++] = w.dot(v);
          }
        }
      };
      QuadratureResult q = integrate_gk(integrand, n_pairs, leg.span_lo(),
                                        leg.span_hi(), cfg.rtol, cfg.atol);
      rep.quadrature_evals += q.evaluations;
      int idx = 0;
      for (int k = 0; k < p; ++k)
        for (int l = k; l < p; ++l) rep.hessian(k, l) += q.value[idx++];
    }
  }

  for (int k = 0; k < p; ++k)
    for (int l = k + 1; l < p; ++l) rep.hessian(l, k) = rep.hessian(k, l);
  rep.hessian_asymmetry = 0.0;  // assembled once per unordered pair

  rep.steps = sens.steps;
  rep.steps += adj.steps;
  rep.backward_steps = adj.backward_accepted;
  rep.rhs_evals = sens.model_rhs_evals + adj.model_rhs_evals;
  return rep;
}

DerivativeReport hessian_fa(const ModelSpec& model, const ObservationSet& obs,
                            const GaussianMetric& metric,
                            const PostProcessor& P, const Vector& theta,
                            const FdStep& step, const SolverConfig& cfg) {
  check_problem(model, obs, metric, P, theta);
  const int p = model.param_dim;
  const Vector h = step.steps(theta);

  DerivativeReport rep;
  rep.method = "fa";
  rep.hessian.resize(p, p);

  DerivativeReport g0 = gradient_asm(model, obs, metric, P, theta, cfg);
  rep.steps = g0.steps;
  rep.rhs_evals = g0.rhs_evals;
  rep.gradient_evals = 1;

  Vector th = theta;
  for (int i = 0; i < p; ++i) {
    th = theta;
    th[i] += h[i];
    DerivativeReport gi = gradient_asm(model, obs, metric, P, th, cfg);
    rep.steps += gi.steps;
    rep.rhs_evals += gi.rhs_evals;
    ++rep.gradient_evals;
    rep.hessian.col(i) = (gi.gradient - g0.gradient) / h[i];
  }

  rep.hessian_asymmetry =
      (rep.hessian - rep.hessian.transpose()).cwiseAbs().maxCoeff();
  rep.hessian = 0.5 * (rep.hessian + rep.hessian.transpose()).eval();
  return rep;
}

DerivativeReport hessian_fa(const ModelSpec& model, const ObservationSet& obs,
                            const GaussianMetric& metric,
                            const PostProcessor& P, const Vector& theta,
                            const SolverConfig& cfg) {
  return hessian_fa(model, obs, metric, P, theta,
                    FdStep::first_difference(cfg), cfg);
}

SmoothedAdjointSolution solve_adjoint_smoothed(
    const ModelSpec& model, const ObservationSet& obs,
    const GaussianMetric& metric, const PostProcessor& P, const Vector& theta,
    const DenseTrajectory& forward, double sigma, const SolverConfig& cfg,
    DenseStorage storage) {
  check_problem(model, obs, metric, P, theta);
  if (!(sigma > 0) || !std::isfinite(sigma))
    throw std::invalid_argument("solve_adjoint_smoothed: sigma must be positive");
  if (forward.empty() || forward.span_lo() > 0.0 ||
      forward.span_hi() < model.horizon)
    throw std::invalid_argument(
        "solve_adjoint_smoothed: forward trajectory must cover [0, horizon]");

  const int m = model.state_dim;
  const int p = model.param_dim;
  const DataInterpolant data(obs);
  const double norm = 1.0 / (sigma * std::sqrt(kTwoPi));

  Vector u_buf(m), y_buf(obs.obs_dim());
  auto dirac = [&](double t) {
    double s = 0;
    for (double ti : obs.times()) {
      const double z = (t - ti) / sigma;
      s += std::exp(-0.5 * z * z);
    }
    return norm * s;
  };

  RhsFn rhs = [&](double t, const Vector& v, Vector& dv) {
    forward.evaluate_into(t, u_buf);
    dv.noalias() = -model.jac_state(t, u_buf, theta).transpose() * v;
    const double w = dirac(t);
    if (w != 0.0) {
      data.evaluate_into(t, y_buf);
      dv.noalias() += w * metric.distance_grad_state(P, y_buf, u_buf);
    }
  };
  QuadratureSpec quad;
  quad.dim = p;
  quad.integrand = [&](double t, const Vector& v, Eigen::Ref<Vector> g) {
    forward.evaluate_into(t, u_buf);
    g.noalias() = model.jac_params(t, u_buf, theta).transpose() * v;
  };

  SolverConfig capped = cfg;
  const double cap = 0.5 * sigma;
  capped.max_step = capped.max_step ? std::min(*capped.max_step, cap) : cap;

  IntegrationResult r = integrate(rhs, Vector::Zero(m), model.horizon, 0.0, {},
                                  capped, &quad, storage);

  SmoothedAdjointSolution out;
  out.sigma = sigma;
  if (storage == DenseStorage::Full) out.v = std::move(r.trajectory);
  out.v0 = r.final_state;
  out.quadratures = -r.quadratures;  // backward orientation
  out.steps = r.stats;
  out.model_rhs_evals = model_equivalents(r.stats.rhs_calls, m + p, m);
  return out;
}

DerivativeReport gradient_smoothed(const ModelSpec& model,
                                   const ObservationSet& obs,
                                   const GaussianMetric& metric,
                                   const PostProcessor& P, const Vector& theta,
                                   double sigma, const SolverConfig& cfg) {
  check_problem(model, obs, metric, P, theta);
  RhsFn rhs = [&model, &theta](double t, const Vector& u, Vector& du) {
    du = model.rhs(t, u, theta);
  };
  IntegrationResult fwd = integrate(rhs, model.init_state(theta), 0.0,
                                    model.horizon, obs.times(), cfg);
  SmoothedAdjointSolution adj =
      solve_adjoint_smoothed(model, obs, metric, P, theta, fwd.trajectory,
                             sigma, cfg, DenseStorage::NodesOnly);

  DerivativeReport rep;
  rep.method = "smoothed";
  rep.gradient = -model.init_jac(theta).transpose() * adj.v0 - adj.quadratures;
  rep.steps = fwd.stats;
  rep.steps += adj.steps;
  rep.backward_steps = adj.steps.accepted;
  rep.rhs_evals = fwd.stats.rhs_calls + adj.model_rhs_evals;
  return rep;
}

}  // namespace odelik
