#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "odelik/types.hpp"

namespace odelik {

/// In-place right-hand side: writes f(t, u) into `dudt` (same length as `u`).
using RhsFn = std::function<void(double t, const Vector& u, Vector& dudt)>;

enum class IntegrationFailure { StepUnderflow, MaxSteps, NonFinite };

/// Thrown when a solve cannot continue; carries the time at which it failed.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(IntegrationFailure kind, double time, const std::string& detail);
  IntegrationFailure kind() const noexcept { return kind_; }
  double time() const noexcept { return time_; }

 private:
  IntegrationFailure kind_;
  double time_;
};

const char* to_string(IntegrationFailure kind);

struct SolverConfig {
  double rtol = 1e-10;
  double atol = 1e-14;
  /// Budget of step attempts (accepted + rejected) per integrate() call.
  long max_steps = 2'000'000;
  /// Step-size controller damping; must lie in (0, 1).
  double safety = 0.9;
  /// Magnitude of the first step; chosen automatically when unset.
  std::optional<double> first_step;
  /// Magnitude cap on every step; unlimited when unset.
  std::optional<double> max_step;
  /// Include quadrature channels in the step-error norm (off by default:
  /// channels ride the grid chosen for the state).
  bool quadrature_in_error_norm = false;

  void validate() const;  // throws std::invalid_argument
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_calls = 0;  // calls of the supplied right-hand side

  StepStats& operator+=(const StepStats& o) {
    accepted += o.accepted;
    rejected += o.rejected;
    rhs_calls += o.rhs_calls;
    return *this;
  }
};

/// Extra integrals q' = g(t, u), q(t_a) = 0, accumulated alongside the state
/// on the same adaptive grid. `integrand` writes g into its last argument
/// (length dim).
struct QuadratureSpec {
  int dim = 0;
  std::function<void(double t, const Vector& u, Eigen::Ref<Vector> g)> integrand;
};

/// Continuous solution assembled from the accepted steps of one solve:
/// one quartic interpolant per step, exact at step endpoints. Spans
/// [lo, hi] whichever direction the integration ran.
class DenseTrajectory {
 public:
  struct Segment {
    double t_start = 0;  // where the step began (right end for backward steps)
    double h = 0;        // signed step actually taken
    Vector u_start;
    Vector u_end;
    Vector c2, c3, c4, c5;  // interpolation coefficients, see evaluate()

    double lo() const { return h >= 0 ? t_start : t_start + h; }
    double hi() const { return h >= 0 ? t_start + h : t_start; }
  };

  DenseTrajectory() = default;

  int dim() const { return dim_; }
  bool empty() const { return segments_.empty(); }
  double span_lo() const { return lo_; }
  double span_hi() const { return hi_; }

  /// Value at t; throws std::out_of_range outside [span_lo, span_hi].
  /// At an accepted step endpoint this returns the stored state exactly.
  Vector evaluate(double t) const;
  void evaluate_into(double t, Eigen::Ref<Vector> out) const;

  /// Components [offset, offset + len) as their own trajectory.
  DenseTrajectory slice(int offset, int len) const;

  const std::vector<Segment>& segments() const { return segments_; }

  /// Used by the solver: segments must be appended in ascending span order
  /// for forward solves, descending for backward ones.
  void append(Segment seg);

 private:
  int dim_ = 0;
  double lo_ = 0, hi_ = 0;
  std::vector<Segment> segments_;  // contiguous, ascending by lo()
  const Segment& find(double t) const;
};

/// Whether integrate() keeps the per-step interpolant or only the states at
/// requested stop times (cheaper for large augmented systems).
enum class DenseStorage { Full, NodesOnly };

struct IntegrationResult {
  DenseTrajectory trajectory;       // empty under DenseStorage::NodesOnly
  std::vector<double> node_times;   // t_a, the stops, t_b
  std::vector<Vector> node_states;  // exact accepted states at node_times
  Vector final_state;               // state at t_b
  Vector quadratures;               // channel integrals over [t_a, t_b], signed
  StepStats stats;
};

/// Dormand–Prince 5(4) solve of u' = rhs(t, u), u(t_a) = u0 over [t_a, t_b]
/// (backward when t_b < t_a). Every stop time is hit exactly by an accepted
/// step endpoint; stops must be strictly between t_a and t_b and strictly
/// monotone in the direction of integration.
IntegrationResult integrate(const RhsFn& rhs, const Vector& u0, double t_a,
                            double t_b, const std::vector<double>& stops,
                            const SolverConfig& cfg,
                            const QuadratureSpec* quadrature = nullptr,
                            DenseStorage storage = DenseStorage::Full);

}  // namespace odelik
