#pragma once

#include <functional>

#include "odelik/types.hpp"

namespace odelik {

struct QuadratureResult {
  Vector value;
  double error_estimate = 0;  // sum of per-panel Kronrod-Gauss differences
  long evaluations = 0;       // integrand calls
};

/// Adaptive Gauss-Kronrod 15(7) for a vector-valued integrand on [a, b]
/// (b < a integrates with the opposite sign). The integrand writes its value
/// at t into the provided buffer of length dim. Panels are bisected until
/// every component's local error fits its share of atol + rtol*|I|, with I
/// the first whole-interval estimate.
QuadratureResult integrate_gk(
    const std::function<void(double t, Eigen::Ref<Vector> out)>& integrand,
    int dim, double a, double b, double rtol, double atol,
    int max_depth = 30);

/// Scalar convenience wrapper.
double integrate_gk_scalar(const std::function<double(double)>& f, double a,
                           double b, double rtol, double atol);

}  // namespace odelik
