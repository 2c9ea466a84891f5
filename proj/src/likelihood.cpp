#include "odelik/likelihood.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace odelik {

ObservationSet::ObservationSet(std::vector<double> times, Matrix values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.empty())
    throw std::invalid_argument("ObservationSet: at least one observation");
  if (values_.rows() != static_cast<Eigen::Index>(times_.size()))
    throw std::invalid_argument(
        "ObservationSet: one row of values per observation time");
  if (values_.cols() < 1)
    throw std::invalid_argument("ObservationSet: empty observation rows");
  if (!values_.allFinite())
    throw std::invalid_argument("ObservationSet: values must be finite");
  double prev = 0.0;  // enforces t_1 > 0 as well
  for (double t : times_) {
    if (!std::isfinite(t) || t <= prev)
      throw std::invalid_argument(
          "ObservationSet: times must be strictly increasing and > 0");
    prev = t;
  }
}

double ObservationSet::min_gap() const {
  if (times_.size() < 2) return times_.front();
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < times_.size(); ++i)
    g = std::min(g, times_[i] - times_[i - 1]);
  return g;
}

void ObservationSet::require_within_horizon(double horizon) const {
  if (times_.back() >= horizon) {
    std::ostringstream os;
    os << "ObservationSet: last observation at t = " << times_.back()
       << " does not lie strictly inside the horizon " << horizon;
    throw std::invalid_argument(os.str());
  }
}

ObservationSet ObservationSet::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ObservationSet: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("ObservationSet: empty file " + path);
  // Header: t,y1,...,yn
  int cols = 0;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) ++cols;
  }
  if (cols < 2)
    throw std::runtime_error("ObservationSet: header must be t,y1,...,yn");
  const int ny = cols - 1;

  std::vector<double> times;
  std::vector<double> flat;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    int c = 0;
    while (std::getline(ss, tok, ',')) {
      double v;
      try {
        v = std::stod(tok);
      } catch (const std::exception&) {
        throw std::runtime_error("ObservationSet: bad number '" + tok +
                                 "' in " + path);
      }
      if (c == 0)
        times.push_back(v);
      else
        flat.push_back(v);
      ++c;
    }
    if (c != cols)
      throw std::runtime_error("ObservationSet: ragged row in " + path);
  }
  Matrix values(times.size(), ny);
  for (std::size_t i = 0; i < times.size(); ++i)
    for (int j = 0; j < ny; ++j)
      values(static_cast<Eigen::Index>(i), j) = flat[i * ny + j];
  return ObservationSet(std::move(times), std::move(values));
}

void ObservationSet::to_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("ObservationSet: cannot write " + path);
  out << "t";
  for (int j = 0; j < obs_dim(); ++j) out << ",y" << (j + 1);
  out << "\n";
  out.precision(17);
  for (int i = 0; i < size(); ++i) {
    out << times_[static_cast<std::size_t>(i)];
    for (int j = 0; j < obs_dim(); ++j) out << "," << values_(i, j);
    out << "\n";
  }
}

PostProcessor::PostProcessor(Matrix P_) : P(std::move(P_)) {
  if (P.rows() < 1 || P.cols() < 1)
    throw std::invalid_argument("PostProcessor: empty matrix");
  if (!P.allFinite())
    throw std::invalid_argument("PostProcessor: matrix must be finite");
}

PostProcessor PostProcessor::identity(int m) {
  return PostProcessor(Matrix::Identity(m, m));
}

GaussianMetric::GaussianMetric(Matrix sigma) : sigma_(std::move(sigma)) {
  if (sigma_.rows() != sigma_.cols() || sigma_.rows() < 1)
    throw std::invalid_argument("GaussianMetric: sigma must be square");
  if (!sigma_.allFinite())
    throw std::invalid_argument("GaussianMetric: sigma must be finite");
  const double scale = sigma_.cwiseAbs().maxCoeff();
  if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("GaussianMetric: sigma must be symmetric");
  llt_.compute(sigma_);
  if (llt_.info() != Eigen::Success)
    throw std::invalid_argument("GaussianMetric: sigma must be positive definite");
}

GaussianMetric GaussianMetric::identity(int dim) {
  return GaussianMetric(Matrix::Identity(dim, dim));
}

double GaussianMetric::distance(const Vector& y, const Vector& y_model) const {
  const Vector r = y - y_model;
  return 0.5 * r.dot(llt_.solve(r));
}

Vector GaussianMetric::distance_grad_state(const PostProcessor& P,
                                           const Vector& y,
                                           const Vector& u) const {
  const Vector r = y - P.apply(u);
  return -P.P.transpose() * llt_.solve(r);
}

Matrix GaussianMetric::distance_hess_state(const PostProcessor& P) const {
  return P.P.transpose() * llt_.solve(P.P);
}

void check_problem(const ModelSpec& model, const ObservationSet& obs,
                   const GaussianMetric& metric, const PostProcessor& P,
                   const Vector& theta) {
  model.validate();
  model.check_params(theta);
  obs.require_within_horizon(model.horizon);
  if (P.state_dim() != model.state_dim)
    throw std::invalid_argument("check_problem: P columns must match state_dim");
  if (P.obs_dim() != obs.obs_dim())
    throw std::invalid_argument(
        "check_problem: P rows must match the observation dimension");
  if (metric.dim() != obs.obs_dim())
    throw std::invalid_argument(
        "check_problem: metric dimension must match the observation dimension");
}

MisfitResult misfit(const ModelSpec& model, const ObservationSet& obs,
                    const GaussianMetric& metric, const PostProcessor& P,
                    const Vector& theta, const SolverConfig& cfg) {
  check_problem(model, obs, metric, P, theta);
  RhsFn rhs = [&model, &theta](double t, const Vector& u, Vector& du) {
    du = model.rhs(t, u, theta);
  };
  IntegrationResult fwd =
      integrate(rhs, model.init_state(theta), 0.0, model.horizon, obs.times(),
                cfg, nullptr, DenseStorage::NodesOnly);
  MisfitResult res;
  for (int i = 0; i < obs.size(); ++i) {
    // node_states[0] is the initial state; observation i sits at node i + 1.
    const Vector& u = fwd.node_states[static_cast<std::size_t>(i) + 1];
    res.misfit += metric.distance(obs.value(i), P.apply(u));
  }
  res.log_likelihood = -res.misfit;
  res.steps = fwd.stats;
  res.rhs_evals = fwd.stats.rhs_calls;
  return res;
}

}  // namespace odelik
