#pragma once

// Shared helpers for the unit tests: random draws, finite-difference probes
// for model callbacks, and small comparison utilities.

#include <cmath>
#include <vector>

#include "odelik/models_builtin.hpp"
#include "odelik/rng.hpp"
#include "odelik/types.hpp"

namespace testsupport {

using odelik::Matrix;
using odelik::Vector;

inline Vector rand_vec(odelik::SplitMix64& rng, int n, double lo, double hi) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Central-difference Jacobian of f: R^n -> R^m, one column per coordinate.
template <class F>
Matrix jacobian_probe(F&& f, const Vector& x, double h) {
  const Vector f0 = f(x);
  Matrix J(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (f(xp) - f(xm)) / (2 * h);
  }
  return J;
}

/// 4-point probe of the second directional derivative of f: R^n -> R^m along
/// directions a and b (both in the same argument).
template <class F>
Vector second_dir_probe(F&& f, const Vector& x, const Vector& a,
                        const Vector& b, double h) {
  return (f(x + h * a + h * b) - f(x + h * a - h * b) -
          f(x - h * a + h * b) + f(x - h * a - h * b)) /
         (4 * h * h);
}

/// 4-point probe of the mixed second derivative of g(x, y) along dx and dy.
template <class G>
Vector cross_dir_probe(G&& g, const Vector& x, const Vector& y,
                       const Vector& dx, const Vector& dy, double h) {
  return (g(x + h * dx, y + h * dy) - g(x + h * dx, y - h * dy) -
          g(x - h * dx, y + h * dy) + g(x - h * dx, y - h * dy)) /
         (4 * h * h);
}

/// Noise-free observations of the diagonal linear model: y_ik = e^{theta_k t_i}.
inline Matrix linear_clean_data(const Vector& theta,
                                const std::vector<double>& times) {
  Matrix y(static_cast<Eigen::Index>(times.size()), theta.size());
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index k = 0; k < theta.size(); ++k)
      y(i, k) = std::exp(theta[k] * times[static_cast<std::size_t>(i)]);
  return y;
}

}  // namespace testsupport
