#pragma once

#include <vector>

#include "odelik/fd.hpp"
#include "odelik/forward_sens.hpp"
#include "odelik/integrator.hpp"
#include "odelik/likelihood.hpp"
#include "odelik/report.hpp"

namespace odelik {

/// Dual state from the backward sweep of dv/dt = −(∂f/∂u)ᵀ v, v(T) = 0,
/// restarted at every measurement time t_i (descending) with the jump
///   v(t_i) = v(t_i⁺) + d_u(y_i, P·u(t_i)).
///
/// The sweep realizes the measurement part of the misfit derivative as jump
/// conditions, so this v is the NEGATIVE of the distributional adjoint (whose
/// source enters with a minus sign); gradient assembly from it uses plus
/// signs throughout. See gradient_asm.
///
/// Alongside the sweep, p quadrature channels accumulate
///   q_k = ∫_0^T ((∂f/∂θ)e_k)ᵀ v dt   (forward orientation).
struct AdjointSolution {
  /// One trajectory per backward leg, in ascending time order:
  /// [0, t_1], [t_1, t_2], …, [t_N, T]. Empty when solved with NodesOnly
  /// storage. Within leg i the value at its left endpoint includes the jump.
  std::vector<DenseTrajectory> segments;
  std::vector<double> jump_times;  // t_1 … t_N
  std::vector<Vector> jumps;       // d_u added at each jump time
  Vector v0;                       // v(0)
  Vector quadratures;              // q, length p
  StepStats steps;
  long backward_accepted = 0;
  long model_rhs_evals = 0;

  /// v(t); at a jump time returns the post-jump (earlier-side) value.
  /// Requires dense storage.
  Vector evaluate(double t) const;
};

/// Backward sweep against a forward trajectory covering [0, T]. The forward
/// solve should have hit the observation times exactly (gradient_asm does)
/// so the jumps see no interpolation error.
AdjointSolution solve_adjoint(const ModelSpec& model, const ObservationSet& obs,
                              const GaussianMetric& metric,
                              const PostProcessor& P, const Vector& theta,
                              const DenseTrajectory& forward,
                              const SolverConfig& cfg,
                              DenseStorage storage = DenseStorage::Full);

/// Misfit gradient by the adjoint sweep: one forward solve of the m-state
/// model, one backward solve of dimension m + p, regardless of p:
///   ∂J/∂θ_k = v(0)ᵀ (∂u0/∂θ) e_k + q_k.
DerivativeReport gradient_asm(const ModelSpec& model, const ObservationSet& obs,
                              const GaussianMetric& metric,
                              const PostProcessor& P, const Vector& theta,
                              const SolverConfig& cfg);

/// Misfit Hessian from one adjoint sweep plus p forward sensitivities:
///   H_kl = Σ_i s_k(t_i)ᵀ d_uu s_l(t_i)
///        + (∂²u0/∂θ∂θ)[e_k,e_l]ᵀ v(0)
///        + ∫_0^T ( (∂²f/∂θ∂θ)[e_k,e_l] + (∂²f/∂θ∂u)[e_k,s_l]
///                 + (∂²f/∂θ∂u)[e_l,s_k] + (∂²f/∂u∂u)[s_k,s_l] )ᵀ v dt,
/// the integrals taken per backward leg with adaptive Gauss-Kronrod panels
/// (no leg crosses a jump).
DerivativeReport hessian_sa(const ModelSpec& model, const ObservationSet& obs,
                            const GaussianMetric& metric,
                            const PostProcessor& P, const Vector& theta,
                            const SolverConfig& cfg);

/// Hessian columns by forward-differencing the adjoint gradient: exactly
/// p + 1 gradient evaluations. Reported after symmetrization, with the raw
/// asymmetry max |H_kl − H_lk| as a finite-difference noise diagnostic.
DerivativeReport hessian_fa(const ModelSpec& model, const ObservationSet& obs,
                            const GaussianMetric& metric,
                            const PostProcessor& P, const Vector& theta,
                            const FdStep& step, const SolverConfig& cfg);
DerivativeReport hessian_fa(const ModelSpec& model, const ObservationSet& obs,
                            const GaussianMetric& metric,
                            const PostProcessor& P, const Vector& theta,
                            const SolverConfig& cfg);  // default FdStep

/// Dual state with the Dirac sources smoothed into Gaussian bumps of width
/// σ: a single backward solve of
///   dv/dt = −(∂f/∂u)ᵀ v + δ_σ(t)·d_u(ȳ(t), P·u(t)),  v(T) = 0,
/// where δ_σ sums one Gaussian per measurement time and ȳ interpolates the
/// data piecewise-linearly (constant beyond the ends). This is the TRUE
/// distributional sign convention, so gradient assembly from it uses minus
/// signs (opposite of the jump sweep). Steps are capped at σ/2 so no bump
/// can be skipped; cost therefore grows as σ shrinks.
struct SmoothedAdjointSolution {
  double sigma = 0;
  DenseTrajectory v;   // over [0, T]
  Vector v0;
  Vector quadratures;  // ∫_0^T ((∂f/∂θ)e_k)ᵀ v dt, forward orientation
  StepStats steps;
  long model_rhs_evals = 0;
};

SmoothedAdjointSolution solve_adjoint_smoothed(
    const ModelSpec& model, const ObservationSet& obs,
    const GaussianMetric& metric, const PostProcessor& P, const Vector& theta,
    const DenseTrajectory& forward, double sigma, const SolverConfig& cfg,
    DenseStorage storage = DenseStorage::Full);

/// Misfit gradient from the smoothed adjoint:
///   ∂J/∂θ_k ≈ −v_σ(0)ᵀ (∂u0/∂θ) e_k − q_k.
DerivativeReport gradient_smoothed(const ModelSpec& model,
                                   const ObservationSet& obs,
                                   const GaussianMetric& metric,
                                   const PostProcessor& P, const Vector& theta,
                                   double sigma, const SolverConfig& cfg);

}  // namespace odelik
