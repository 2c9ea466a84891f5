#pragma once

#include <vector>

#include "odelik/integrator.hpp"
#include "odelik/likelihood.hpp"
#include "odelik/model.hpp"
#include "odelik/report.hpp"

namespace odelik {

/// State and first-order sensitivities s_k = ∂u/∂θ_k from one solve of the
/// augmented system
///   u'  = f(t, u, θ),            u(0)  = u0(θ)
///   s_k' = (∂f/∂u)s_k + (∂f/∂θ)e_k,  s_k(0) = (∂u0/∂θ)e_k.
struct SensitivitySolution {
  int m = 0, p = 0;
  std::vector<double> node_times;  // 0, the stops, T
  Matrix base_nodes;               // m × n_nodes: u at the node times
  std::vector<Matrix> dir_nodes;   // p matrices m × n_nodes: s_k at the nodes

  DenseTrajectory base;                    // empty under NodesOnly storage
  std::vector<DenseTrajectory> directions; // likewise

  StepStats steps;
  long model_rhs_evals = 0;  // functor calls × (1 + p)

  const Matrix& s_nodes(int k) const { return dir_nodes[static_cast<std::size_t>(k)]; }
};

SensitivitySolution solve_sensitivities(const ModelSpec& model,
                                        const Vector& theta,
                                        const std::vector<double>& stops,
                                        const SolverConfig& cfg,
                                        DenseStorage storage = DenseStorage::Full);

/// Misfit gradient by forward sensitivities:
///   ∂J/∂θ_k = Σ_i d_u(y_i, P·u(t_i))ᵀ s_k(t_i).
DerivativeReport gradient_se(const ModelSpec& model, const ObservationSet& obs,
                             const GaussianMetric& metric,
                             const PostProcessor& P, const Vector& theta,
                             const SolverConfig& cfg);

/// Second sensitivities ς_kl = ∂²u/∂θ_k∂θ_l, one linear m-dimensional solve
/// per unordered parameter pair, sourced by the stored first sensitivities:
///   ς_kl' = (∂²f/∂θ∂θ)[e_k,e_l] + (∂²f/∂θ∂u)[e_k,s_l] + (∂²f/∂θ∂u)[e_l,s_k]
///           + (∂²f/∂u∂u)[s_k,s_l] + (∂f/∂u)ς_kl,
///   ς_kl(0) = (∂²u0/∂θ∂θ)[e_k,e_l].
struct SecondSensitivitySolution {
  int m = 0, p = 0;
  std::vector<double> node_times;
  std::vector<Matrix> pair_nodes;        // ς_kl at nodes, pair_index order
  std::vector<DenseTrajectory> pairs;    // empty under NodesOnly storage
  StepStats steps;
  long model_rhs_evals = 0;

  /// Storage index of the unordered pair (k, l); upper triangle row-major.
  int pair_index(int k, int l) const;
};

SecondSensitivitySolution solve_second_sensitivities(
    const ModelSpec& model, const Vector& theta, const SensitivitySolution& sens,
    const std::vector<double>& stops, const SolverConfig& cfg,
    DenseStorage storage = DenseStorage::Full);

/// Misfit Hessian from first and second sensitivities (no adjoint):
///   H_kl = Σ_i [ s_k(t_i)ᵀ d_uu s_l(t_i) + d_u(t_i)ᵀ ς_kl(t_i) ].
/// Exact (up to solver error), hence the reference for methods without a
/// closed-form oracle. The gradient falls out for free and is reported too.
DerivativeReport hessian_se(const ModelSpec& model, const ObservationSet& obs,
                            const GaussianMetric& metric,
                            const PostProcessor& P, const Vector& theta,
                            const SolverConfig& cfg);

}  // namespace odelik
