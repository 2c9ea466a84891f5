#pragma once

#include <string>
#include <vector>

#include "odelik/integrator.hpp"
#include "odelik/model.hpp"
#include "odelik/types.hpp"

namespace odelik {

/// Measurements y_i at strictly increasing times t_i > 0. Whether the times
/// fit under a model horizon is checked at the point of use (the horizon is
/// the model's business, not the data's).
class ObservationSet {
 public:
  /// values is n_obs × obs_dim, row i belonging to times[i].
  ObservationSet(std::vector<double> times, Matrix values);

  int size() const { return static_cast<int>(times_.size()); }
  int obs_dim() const { return static_cast<int>(values_.cols()); }
  const std::vector<double>& times() const { return times_; }
  const Matrix& values() const { return values_; }
  Vector value(int i) const { return values_.row(i).transpose(); }

  /// Smallest spacing between consecutive times (the first time itself when
  /// there is only one); sets the scale for Dirac smoothing widths.
  double min_gap() const;

  /// Throws std::invalid_argument unless every t_i < T. Together with the
  /// constructor this rejects measurements at t = 0 and t = T.
  void require_within_horizon(double horizon) const;

  /// CSV with header "t,y1,...,yn", one row per observation.
  static ObservationSet from_csv(const std::string& path);
  void to_csv(const std::string& path) const;

 private:
  std::vector<double> times_;
  Matrix values_;
};

/// Linear map from model state to observation space.
struct PostProcessor {
  Matrix P;  // obs_dim × state_dim

  explicit PostProcessor(Matrix P_);
  static PostProcessor identity(int m);
  int obs_dim() const { return static_cast<int>(P.rows()); }
  int state_dim() const { return static_cast<int>(P.cols()); }
  Vector apply(const Vector& u) const { return P * u; }
};

/// Squared Mahalanobis distance d(y, ŷ) = ½ (y−ŷ)ᵀ Σ⁻¹ (y−ŷ). Σ is
/// factorized once at construction and must be symmetric positive definite.
class GaussianMetric {
 public:
  explicit GaussianMetric(Matrix sigma);
  static GaussianMetric identity(int dim);

  int dim() const { return static_cast<int>(sigma_.rows()); }
  const Matrix& sigma() const { return sigma_; }

  double distance(const Vector& y, const Vector& y_model) const;

  /// ∂d/∂u at ŷ = P·u: −Pᵀ Σ⁻¹ (y − P·u).
  Vector distance_grad_state(const PostProcessor& P, const Vector& y,
                             const Vector& u) const;

  /// ∂²d/∂u² = Pᵀ Σ⁻¹ P (independent of the residual).
  Matrix distance_hess_state(const PostProcessor& P) const;

 private:
  Matrix sigma_;
  Eigen::LLT<Matrix> llt_;
};

struct MisfitResult {
  double misfit = 0;          // J(θ) = Σ_i d(y_i, P·u(t_i))
  double log_likelihood = 0;  // −J: the Gaussian log-likelihood up to its
                              // θ-independent normalizing constant
  StepStats steps;
  long rhs_evals = 0;
};

/// Checks that model, observations, P, metric and θ fit together; throws
/// std::invalid_argument otherwise. Every derivative method funnels through
/// this.
void check_problem(const ModelSpec& model, const ObservationSet& obs,
                   const GaussianMetric& metric, const PostProcessor& P,
                   const Vector& theta);

MisfitResult misfit(const ModelSpec& model, const ObservationSet& obs,
                    const GaussianMetric& metric, const PostProcessor& P,
                    const Vector& theta, const SolverConfig& cfg);

}  // namespace odelik
