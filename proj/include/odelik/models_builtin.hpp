#pragma once

#include <vector>

#include "odelik/model.hpp"

namespace odelik {

/// Decoupled test model with m = p: f_i = θ_i u_i, u0 = (1, …, 1), so
/// u_i(t) = exp(θ_i t) exactly. Closed-form misfit derivatives below make it
/// the accuracy oracle for every method.
ModelSpec make_linear_diagonal(int p, double horizon = 100.0);

/// Five-compartment HIV treatment model (states T_NI, T_L, T_A, V_I, V_NI;
/// 11 parameters λ, γ, μ_NI, μ_L, μ_A, μ_V, p, α_L, π, η_NRTI, η_PI).
/// Infection flux q = (1 − η_NRTI)·γ·T_NI·V_I:
///   T_NI' = λ − q − μ_NI·T_NI
///   T_L'  = (1 − π)·q − (α_L + μ_L)·T_L
///   T_A'  = π·q + α_L·T_L − μ_A·T_A
///   V_I'  = (1 − η_PI)·p·T_A − μ_V·V_I
///   V_NI' = η_PI·p·T_A − μ_V·V_NI
/// u0 is θ-independent and supplied by the caller.
ModelSpec make_hiv(const Vector& u0, double horizon = 40.0);

/// Published reference parameter values for the HIV model, in the order
/// above: (2.61, 0.0021, 0.0085, 0.0092, 0.289, 30, 641, 1.6e-5, 0.443,
/// 0.90, 0.99).
Vector hiv_reference_params();

/// Benchmark default initial state (300, 10, 10, 1000, 100): an
/// on-treatment decaying regime that stays positive over the default
/// horizon.
Vector hiv_default_init_state();

/// Throws std::invalid_argument unless θ is a valid HIV parameter vector:
/// length 11, finite, both drug efficacies in [0, 1).
void hiv_check_params(const Vector& theta);

/// Observation matrix mapping the HIV state to (total T cells, total virus):
/// rows (1,1,1,0,0) and (0,0,0,1,1).
Matrix hiv_observation_matrix();

/// Closed-form derivatives of the Gaussian log-likelihood l(θ) = −J(θ) for
/// the linear diagonal model with identity observation and identity residual
/// covariance. data(i, k) is the observation of component k at times[i].
///   ∂l/∂θ_k = Σ_i (y_ik − e^{θ_k t_i})·e^{θ_k t_i}·t_i
/// The Hessian is diagonal, the sum of a Fisher part
///   F_kk = −Σ_i (e^{θ_k t_i}·t_i)²
/// and a residual part
///   S_kk = Σ_i (y_ik − e^{θ_k t_i})·e^{θ_k t_i}·t_i².
/// NOTE: the library's methods differentiate the misfit J = −l; comparisons
/// against these oracles must negate one side.
Vector exact_gradient_linear(const Vector& theta,
                             const std::vector<double>& times,
                             const Matrix& data);
Matrix exact_hessian_linear(const Vector& theta,
                            const std::vector<double>& times,
                            const Matrix& data);

}  // namespace odelik
