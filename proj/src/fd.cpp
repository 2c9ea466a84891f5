#include "odelik/fd.hpp"

#include <cmath>
#include <limits>

namespace odelik {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

FdStep FdStep::first_difference(const SolverConfig& cfg) {
  return FdStep{std::sqrt(std::max(cfg.rtol, kEps)), 1.0};
}

FdStep FdStep::second_difference(const SolverConfig& cfg) {
  return FdStep{std::cbrt(std::max(cfg.rtol, kEps)), 1.0};
}

void FdStep::validate() const {
  if (!(scale > 0) || !std::isfinite(scale))
    throw std::invalid_argument("FdStep: scale must be positive");
  if (!(floor >= 0) || !std::isfinite(floor))
    throw std::invalid_argument("FdStep: floor must be nonnegative");
}

Vector FdStep::steps(const Vector& theta) const {
  validate();
  Vector h(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    h[i] = scale * std::max(std::abs(theta[i]), floor);
    if (!(h[i] > 0))
      throw std::invalid_argument(
          "FdStep: zero step (theta component 0 with floor 0)");
  }
  return h;
}

void FdConfig::validate() const {
  if (scale && (!(*scale > 0) || !std::isfinite(*scale)))
    throw std::invalid_argument("FdConfig: scale must be positive");
  if (!(floor >= 0) || !std::isfinite(floor))
    throw std::invalid_argument("FdConfig: floor must be nonnegative");
}

FdStep FdConfig::resolve_first(const SolverConfig& cfg) const {
  validate();
  FdStep s = FdStep::first_difference(cfg);
  if (scale) s.scale = *scale;
  s.floor = floor;
  return s;
}

FdStep FdConfig::resolve_second(const SolverConfig& cfg) const {
  validate();
  FdStep s = FdStep::second_difference(cfg);
  if (scale) s.scale = *scale;
  s.floor = floor;
  return s;
}

namespace {

struct MisfitProbe {
  const ModelSpec& model;
  const ObservationSet& obs;
  const GaussianMetric& metric;
  const PostProcessor& P;
  const SolverConfig& cfg;
  DerivativeReport& rep;

  double operator()(const Vector& theta) {
    MisfitResult r = misfit(model, obs, metric, P, theta, cfg);
    rep.steps += r.steps;
    rep.rhs_evals += r.rhs_evals;
    ++rep.misfit_evals;
    return r.misfit;
  }
};

}  // namespace

DerivativeReport gradient_fd(const ModelSpec& model, const ObservationSet& obs,
                             const GaussianMetric& metric,
                             const PostProcessor& P, const Vector& theta,
                             const FdConfig& fd, const SolverConfig& cfg) {
  check_problem(model, obs, metric, P, theta);
  const int p = model.param_dim;
  const Vector h = fd.resolve_first(cfg).steps(theta);

  DerivativeReport rep;
  rep.method = "fd";
  rep.gradient.resize(p);
  MisfitProbe probe{model, obs, metric, P, cfg, rep};

  Vector th = theta;
  if (fd.scheme == FdScheme::Forward) {
    const double j0 = probe(theta);
    for (int i = 0; i < p; ++i) {
      th = theta;
      th[i] += h[i];
      rep.gradient[i] = (probe(th) - j0) / h[i];
    }
  } else {
    for (int i = 0; i < p; ++i) {
      th = theta;
      th[i] = theta[i] + h[i];
      const double jp = probe(th);
      th[i] = theta[i] - h[i];
      const double jm = probe(th);
      rep.gradient[i] = (jp - jm) / (2.0 * h[i]);
    }
  }
  return rep;
}

DerivativeReport hessian_fd(const ModelSpec& model, const ObservationSet& obs,
                            const GaussianMetric& metric,
                            const PostProcessor& P, const Vector& theta,
                            const FdConfig& fd, const SolverConfig& cfg) {
  check_problem(model, obs, metric, P, theta);
  const int p = model.param_dim;
  const Vector h = fd.resolve_second(cfg).steps(theta);

  DerivativeReport rep;
  rep.method = "fd";
  rep.hessian.resize(p, p);
  MisfitProbe probe{model, obs, metric, P, cfg, rep};

  Vector th = theta;
  if (fd.scheme == FdScheme::Forward) {
    // J at θ, at each θ + h_k e_k, and at each θ + h_k e_k + h_l e_l:
    // (p+1)(p+2)/2 evaluations in total.
    const double j0 = probe(theta);
    Vector jk(p);
    for (int k = 0; k < p; ++k) {
      th = theta;
      th[k] += h[k];
      jk[k] = probe(th);
    }
    for (int k = 0; k < p; ++k) {
      for (int l = k; l < p; ++l) {
        th = theta;
        th[k] += h[k];
        th[l] += h[l];
        const double jkl = probe(th);
        rep.hessian(k, l) = (jkl - jk[k] - jk[l] + j0) / (h[k] * h[l]);
      }
    }
  } else {
    const double j0 = probe(theta);
    for (int k = 0; k < p; ++k) {
      th = theta;
      th[k] = theta[k] + h[k];
      const double jp = probe(th);
      th[k] = theta[k] - h[k];
      const double jm = probe(th);
      rep.hessian(k, k) = (jp - 2.0 * j0 + jm) / (h[k] * h[k]);
    }
    for (int k = 0; k < p; ++k) {
      for (int l = k + 1; l < p; ++l) {
        double acc = 0;
        for (int sk : {1, -1}) {
          for (int sl : {1, -1}) {
            th = theta;
            th[k] = theta[k] + sk * h[k];
            th[l] = theta[l] + sl * h[l];
            acc += sk * sl * probe(th);
          }
        }
        rep.hessian(k, l) = acc / (4.0 * h[k] * h[l]);
      }
    }
  }
  for (int k = 0; k < p; ++k)
    for (int l = k + 1; l < p; ++l) rep.hessian(l, k) = rep.hessian(k, l);
  rep.hessian_asymmetry = 0.0;  // upper triangle assembled once
  return rep;
}

}  // namespace odelik
