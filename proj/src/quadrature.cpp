#include "odelik/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace odelik {

namespace {

// 15-point Kronrod nodes on [-1, 1] (positive half) and their weights; the
// even-indexed nodes form the embedded 7-point Gauss rule.
constexpr double xgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993945, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double wgk[8] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
constexpr double wg[4] = {0.1294849661688697, 0.2797053914892767,
                          0.3818300505051189, 0.4179591836734694};

struct Workspace {
  const std::function<void(double, Eigen::Ref<Vector>)>& f;
  int dim;
  Vector fbuf;
  Vector kron, gauss;
  Vector tol;           // per-component absolute budget for the whole span
  double inv_width;     // 1 / |b - a|
  QuadratureResult out;
  int max_depth;

  // One Kronrod/Gauss evaluation of [lo, hi]; fills kron and gauss.
  void panel(double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    kron.setZero(dim);
    gauss.setZero(dim);
    for (int i = 0; i < 8; ++i) {
      const int reps = xgk[i] == 0.0 ? 1 : 2;
      for (int r = 0; r < reps; ++r) {
        const double x = r == 0 ? center + half * xgk[i] : center - half * xgk[i];
        f(x, fbuf);
        ++out.evaluations;
        kron += wgk[i] * fbuf;
        if (i % 2 == 1) gauss += wg[i / 2] * fbuf;
      }
    }
    kron *= half;
    gauss *= half;
  }

  void refine(double lo, double hi, const Vector& kron_est, const Vector& err,
              int depth) {
    const double share = (hi - lo) * inv_width;
    bool ok = true;
    for (int j = 0; j < dim; ++j) {
      if (err[j] > tol[j] * share) {
        ok = false;
        break;
      }
    }
    if (ok || depth >= max_depth) {
      out.value += kron_est;
      out.error_estimate += err.sum();
      return;
    }
    const double mid = 0.5 * (lo + hi);
    panel(lo, mid);
    Vector kl = kron, el = (kron - gauss).cwiseAbs();
    refine(lo, mid, kl, el, depth + 1);
    panel(mid, hi);
    Vector kr = kron, er = (kron - gauss).cwiseAbs();
    refine(mid, hi, kr, er, depth + 1);
  }
};

}  // namespace

QuadratureResult integrate_gk(
    const std::function<void(double t, Eigen::Ref<Vector> out)>& integrand,
    int dim, double a, double b, double rtol, double atol, int max_depth) {
  if (dim < 1) throw std::invalid_argument("integrate_gk: dim must be >= 1");
  if (!integrand) throw std::invalid_argument("integrate_gk: empty integrand");
  if (!(std::isfinite(a) && std::isfinite(b)))
    throw std::invalid_argument("integrate_gk: bounds must be finite");

  QuadratureResult res;
  res.value = Vector::Zero(dim);
  if (a == b) return res;

  const double sign = b > a ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);

  Workspace ws{integrand, dim, Vector(dim), Vector(dim), Vector(dim),
               Vector(dim), 1.0 / (hi - lo), std::move(res), max_depth};
  ws.panel(lo, hi);
  Vector k0 = ws.kron;
  Vector e0 = (ws.kron - ws.gauss).cwiseAbs();
  ws.tol = (atol + rtol * k0.cwiseAbs().array()).matrix();
  ws.refine(lo, hi, k0, e0, 0);

  ws.out.value *= sign;
  return std::move(ws.out);
}

double integrate_gk_scalar(const std::function<double(double)>& f, double a,
                           double b, double rtol, double atol) {
  auto wrapped = [&f](double t, Eigen::Ref<Vector> out) { out[0] = f(t); };
  return integrate_gk(wrapped, 1, a, b, rtol, atol).value[0];
}

}  // namespace odelik
