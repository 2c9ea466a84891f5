#pragma once

#include <functional>
#include <string>

#include "odelik/types.hpp"

namespace odelik {

/// An ODE model du/dt = f(t, u, θ), u(0) = u0(θ) on [0, horizon], together
/// with every derivative the sensitivity and adjoint machinery needs.
///
/// Second derivatives are exposed as directional contractions so models never
/// materialize rank-3 tensors:
///   hess_params_params(t,u,θ,a,b)[i] = Σ_{k,l} ∂²f_i/∂θ_k∂θ_l a_k b_l
///   hess_params_state(t,u,θ,a,w)[i]  = Σ_{k,j} ∂²f_i/∂θ_k∂u_j a_k w_j
///   hess_state_state(t,u,θ,w,z)[i]   = Σ_{j,r} ∂²f_i/∂u_j∂u_r w_j z_r
/// and likewise init_hess(θ,a,b)[i] = Σ_{k,l} ∂²u0_i/∂θ_k∂θ_l a_k b_l.
struct ModelSpec {
  std::string name;
  int state_dim = 0;   // m
  int param_dim = 0;   // p
  double horizon = 0;  // T

  std::function<Vector(double, const Vector&, const Vector&)> rhs;
  std::function<Matrix(double, const Vector&, const Vector&)> jac_state;   // m×m
  std::function<Matrix(double, const Vector&, const Vector&)> jac_params;  // m×p

  std::function<Vector(double, const Vector&, const Vector&, const Vector&,
                       const Vector&)>
      hess_params_params;
  std::function<Vector(double, const Vector&, const Vector&, const Vector&,
                       const Vector&)>
      hess_params_state;
  std::function<Vector(double, const Vector&, const Vector&, const Vector&,
                       const Vector&)>
      hess_state_state;

  std::function<Vector(const Vector&)> init_state;  // u0(θ), length m
  std::function<Matrix(const Vector&)> init_jac;    // ∂u0/∂θ, m×p
  std::function<Vector(const Vector&, const Vector&, const Vector&)> init_hess;

  /// Throws std::invalid_argument when a callback is missing or the
  /// dimensions are degenerate.
  void validate() const;

  /// Throws std::invalid_argument unless θ has length param_dim with only
  /// finite entries.
  void check_params(const Vector& theta) const;
};

}  // namespace odelik
