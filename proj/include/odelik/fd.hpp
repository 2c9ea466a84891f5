#pragma once

#include <optional>

#include "odelik/likelihood.hpp"
#include "odelik/report.hpp"

namespace odelik {

/// Per-component finite-difference steps h_i = scale · max(|θ_i|, floor).
///
/// The default scales tie the step to the actual evaluation error, which is
/// solver-dominated (≈ rtol), not machine epsilon: √(max(rtol, ε)) for first
/// differences of values whose error is ≈ rtol, and max(rtol, ε)^{1/3} for
/// second differences.
struct FdStep {
  double scale;
  double floor = 1.0;

  static FdStep first_difference(const SolverConfig& cfg);
  static FdStep second_difference(const SolverConfig& cfg);

  Vector steps(const Vector& theta) const;
  void validate() const;
};

enum class FdScheme { Forward, Central };

struct FdConfig {
  FdScheme scheme = FdScheme::Forward;
  /// Step scale c; when unset each operation picks its default (see FdStep).
  std::optional<double> scale;
  double floor = 1.0;

  void validate() const;
  FdStep resolve_first(const SolverConfig& cfg) const;
  FdStep resolve_second(const SolverConfig& cfg) const;
};

/// Gradient of the misfit by differencing misfit values: p+1 evaluations
/// forward, 2p central.
DerivativeReport gradient_fd(const ModelSpec& model, const ObservationSet& obs,
                             const GaussianMetric& metric,
                             const PostProcessor& P, const Vector& theta,
                             const FdConfig& fd, const SolverConfig& cfg);

/// Hessian of the misfit by second differences of misfit values. The forward
/// scheme uses exactly (p+1)(p+2)/2 evaluations; central uses 1 + 2p².
DerivativeReport hessian_fd(const ModelSpec& model, const ObservationSet& obs,
                            const GaussianMetric& metric,
                            const PostProcessor& P, const Vector& theta,
                            const FdConfig& fd, const SolverConfig& cfg);

}  // namespace odelik
