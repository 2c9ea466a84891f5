#pragma once

#include <string>

#include "odelik/integrator.hpp"
#include "odelik/types.hpp"

namespace odelik {

/// Common result of every gradient/Hessian method, with the counters the
/// benchmark and the scaling tests read off.
struct DerivativeReport {
  std::string method;  // "fd" | "se" | "asm" | "sa" | "fa" | "smoothed"
  Vector gradient;     // empty when the method computes only a Hessian
  Matrix hessian;      // empty when the method computes only a gradient

  double seconds = 0;  // filled by callers that time the computation
  StepStats steps;     // integrator work, summed over all solves

  /// Model-equivalent right-hand-side evaluations: integrator functor calls
  /// weighted by (integrated system dimension / m). One unit is one
  /// evaluation of an m-dimensional model system.
  long rhs_evals = 0;

  long backward_steps = 0;   // accepted steps over all backward legs (adjoint)
  long misfit_evals = 0;     // misfit evaluations (FD baselines)
  long gradient_evals = 0;   // gradient evaluations (FD-of-adjoint Hessian)
  long quadrature_evals = 0; // Gauss-Kronrod integrand evaluations (SA)

  /// max |H_kl − H_lk| before symmetrization; 0 for methods that assemble
  /// the upper triangle once.
  double hessian_asymmetry = 0;
};

}  // namespace odelik
