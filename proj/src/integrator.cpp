#include "odelik/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace odelik {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
// Stage 7 = the 5th-order solution (FSAL).
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                 c5 = 8.0 / 9.0;
// Difference between the 5th- and 4th-order weights (error estimate).
constexpr double er1 = 71.0 / 57600.0, er3 = -71.0 / 16695.0,
                 er4 = 71.0 / 1920.0, er5 = -17253.0 / 339200.0,
                 er6 = 22.0 / 525.0, er7 = -1.0 / 40.0;
// Dense-output weights for the quartic interpolant.
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string fail_message(IntegrationFailure kind, double time,
                         const std::string& detail) {
  std::ostringstream os;
  os << "integration failed (" << to_string(kind) << ") at t = " << time;
  if (!detail.empty()) os << ": " << detail;
  return os.str();
}

}  // namespace

IntegrationError::IntegrationError(IntegrationFailure kind, double time,
                                   const std::string& detail)
    : std::runtime_error(fail_message(kind, time, detail)),
      kind_(kind),
      time_(time) {}

const char* to_string(IntegrationFailure kind) {
  switch (kind) {
    case IntegrationFailure::StepUnderflow: return "step_underflow";
    case IntegrationFailure::MaxSteps: return "max_steps";
    case IntegrationFailure::NonFinite: return "nonfinite";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(rtol > 0) || !std::isfinite(rtol))
    throw std::invalid_argument("SolverConfig: rtol must be positive");
  if (!(atol > 0) || !std::isfinite(atol))
    throw std::invalid_argument("SolverConfig: atol must be positive");
  if (max_steps < 1)
    throw std::invalid_argument("SolverConfig: max_steps must be >= 1");
  if (!(safety > 0.0 && safety < 1.0))
    throw std::invalid_argument("SolverConfig: safety must lie in (0, 1)");
  if (first_step && !(*first_step > 0 && std::isfinite(*first_step)))
    throw std::invalid_argument("SolverConfig: first_step must be positive");
  if (max_step && !(*max_step > 0 && std::isfinite(*max_step)))
    throw std::invalid_argument("SolverConfig: max_step must be positive");
}

void DenseTrajectory::append(Segment seg) {
  if (segments_.empty()) {
    dim_ = static_cast<int>(seg.u_start.size());
    lo_ = seg.lo();
    hi_ = seg.hi();
  } else {
    lo_ = std::min(lo_, seg.lo());
    hi_ = std::max(hi_, seg.hi());
  }
  segments_.push_back(std::move(seg));
}

const DenseTrajectory::Segment& DenseTrajectory::find(double t) const {
  // Segments are contiguous and ascending: pick the first whose upper end
  // reaches t.
  auto it = std::partition_point(segments_.begin(), segments_.end(),
                                 [t](const Segment& s) { return s.hi() < t; });
  if (it == segments_.end()) --it;
  return *it;
}

Vector DenseTrajectory::evaluate(double t) const {
  Vector out(dim_);
  evaluate_into(t, out);
  return out;
}

void DenseTrajectory::evaluate_into(double t, Eigen::Ref<Vector> out) const {
  if (segments_.empty())
    throw std::out_of_range("DenseTrajectory: empty trajectory");
  if (t < lo_ || t > hi_) {
    std::ostringstream os;
    os << "DenseTrajectory: t = " << t << " outside stored span [" << lo_
       << ", " << hi_ << "]";
    throw std::out_of_range(os.str());
  }
  const Segment& s = find(t);
  if (t == s.t_start) {
    out = s.u_start;
    return;
  }
  if (t == s.t_start + s.h) {
    out = s.u_end;
    return;
  }
  const double th = (t - s.t_start) / s.h;
  const double th1 = 1.0 - th;
  out = s.u_start + th * (s.c2 + th1 * (s.c3 + th * (s.c4 + th1 * s.c5)));
}

DenseTrajectory DenseTrajectory::slice(int offset, int len) const {
  if (offset < 0 || len <= 0 || offset + len > dim_)
    throw std::invalid_argument("DenseTrajectory::slice: range out of bounds");
  DenseTrajectory out;
  out.dim_ = len;
  out.lo_ = lo_;
  out.hi_ = hi_;
  out.segments_.reserve(segments_.size());
  for (const Segment& s : segments_) {
    Segment t;
    t.t_start = s.t_start;
    t.h = s.h;
    t.u_start = s.u_start.segment(offset, len);
    t.u_end = s.u_end.segment(offset, len);
    t.c2 = s.c2.segment(offset, len);
    t.c3 = s.c3.segment(offset, len);
    t.c4 = s.c4.segment(offset, len);
    t.c5 = s.c5.segment(offset, len);
    out.segments_.push_back(std::move(t));
  }
  return out;
}

namespace {

class Stepper {
 public:
  Stepper(const RhsFn& rhs, int state_dim, const QuadratureSpec* quad,
          const SolverConfig& cfg)
      : rhs_(rhs),
        m_(state_dim),
        qdim_(quad ? quad->dim : 0),
        quad_(quad),
        cfg_(cfg),
        n_(m_ + qdim_),
        nerr_(cfg.quadrature_in_error_norm ? n_ : m_) {
    u_buf_.resize(m_);
    du_buf_.resize(m_);
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_}) v->resize(n_);
    y_.resize(n_);
    ynew_.resize(n_);
    ystage_.resize(n_);
    err_vec_.resize(n_);
  }

  // Augmented rhs: state part from the user functor, channel part from the
  // quadrature integrand.
  void eval(double t, const Vector& y, Vector& dy) {
    u_buf_ = y.head(m_);
    rhs_(t, u_buf_, du_buf_);
    dy.head(m_) = du_buf_;
    if (qdim_ > 0) quad_->integrand(t, u_buf_, dy.tail(qdim_));
    ++stats_.rhs_calls;
  }

  double weighted_rms(const Vector& e, const Vector& ya, const Vector& yb) const {
    double acc = 0;
    for (int j = 0; j < nerr_; ++j) {
      const double sc =
          cfg_.atol + cfg_.rtol * std::max(std::abs(ya[j]), std::abs(yb[j]));
      const double r = e[j] / sc;
      acc += r * r;
    }
    return std::sqrt(acc / nerr_);
  }

  double rms_scaled(const Vector& v, const Vector& ref) const {
    double acc = 0;
    for (int j = 0; j < nerr_; ++j) {
      const double sc = cfg_.atol + cfg_.rtol * std::abs(ref[j]);
      const double r = v[j] / sc;
      acc += r * r;
    }
    return std::sqrt(acc / nerr_);
  }

  // Classical automatic initial-step selection; assumes k1_ = f(t0, y_).
  double initial_step(double t0, double dir, double span_mag) {
    const double cap =
        cfg_.max_step ? std::min(span_mag, *cfg_.max_step) : span_mag;
    const double d0 = rms_scaled(y_, y_);
    const double d1 = rms_scaled(k1_, y_);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * (d0 / d1);
    h0 = std::min(h0, cap);
    ystage_ = y_ + dir * h0 * k1_;
    eval(t0 + dir * h0, ystage_, k2_);
    double h1;
    if (!k2_.allFinite()) {
      h1 = h0 * 1e-3;
    } else {
      err_vec_ = k2_ - k1_;
      const double d2 = rms_scaled(err_vec_, y_) / h0;
      const double dm = std::max(d1, d2);
      h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                       : std::pow(0.01 / dm, 0.2);
    }
    return std::min({100.0 * h0, h1, cap});
  }

  IntegrationResult run(const Vector& y0, double t_a, double t_b,
                        const std::vector<double>& stops, DenseStorage storage) {
    const double dir = t_b > t_a ? 1.0 : -1.0;

    std::vector<double> targets(stops);
    targets.push_back(t_b);

    IntegrationResult res;
    res.node_times.reserve(targets.size() + 1);
    res.node_states.reserve(targets.size() + 1);

    y_.head(m_) = y0;
    y_.tail(qdim_).setZero();
    double t = t_a;
    res.node_times.push_back(t);
    res.node_states.push_back(y0);

    eval(t, y_, k1_);
    if (!k1_.allFinite())
      throw IntegrationError(IntegrationFailure::NonFinite, t,
                             "right-hand side not finite at the initial state");

    double h_mag = cfg_.first_step
                       ? std::min(*cfg_.first_step, std::abs(t_b - t_a))
                       : initial_step(t, dir, std::abs(t_b - t_a));
    if (cfg_.max_step) h_mag = std::min(h_mag, *cfg_.max_step);

    std::vector<DenseTrajectory::Segment> segs;
    std::size_t next_target = 0;
    bool last_rejected = false;

    while (true) {
      if (stats_.accepted + stats_.rejected >= cfg_.max_steps)
        throw IntegrationError(IntegrationFailure::MaxSteps, t,
                               "step budget exhausted");

      const double target = targets[next_target];
      bool hit = false;
      double h = dir * h_mag;
      if (dir * (t + h) >= dir * target) {
        h = target - t;
        hit = true;
      } else if (h_mag < 16.0 * kEps * std::max(std::abs(t), 1.0)) {
        throw IntegrationError(IntegrationFailure::StepUnderflow, t,
                               "step size below machine resolution");
      }

      // Stages 2..6, then the 5th-order candidate and its FSAL stage.
      ystage_ = y_ + h * (a21 * k1_);
      eval(t + c2 * h, ystage_, k2_);
      ystage_ = y_ + h * (a31 * k1_ + a32 * k2_);
      eval(t + c3 * h, ystage_, k3_);
      ystage_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
      eval(t + c4 * h, ystage_, k4_);
      ystage_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
      eval(t + c5 * h, ystage_, k5_);
      ystage_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
      eval(t + h, ystage_, k6_);
      ynew_ = y_ + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
      eval(t + h, ynew_, k7_);

      err_vec_ = h * (er1 * k1_ + er3 * k3_ + er4 * k4_ + er5 * k5_ +
                      er6 * k6_ + er7 * k7_);
      const double err = weighted_rms(err_vec_, y_, ynew_);

      if (!std::isfinite(err)) {
        // Overflow inside the attempted span; retry much smaller.
        ++stats_.rejected;
        last_rejected = true;
        h_mag = 0.1 * std::abs(h);
        if (h_mag < 16.0 * kEps * std::max(std::abs(t), 1.0))
          throw IntegrationError(IntegrationFailure::NonFinite, t,
                                 "state not recoverable by step reduction");
        continue;
      }

      const double fac_max = last_rejected ? 1.0 : kFacMax;
      double fac = err == 0.0 ? fac_max
                              : cfg_.safety * std::pow(err, -0.2);
      fac = std::clamp(fac, kFacMin, fac_max);

      if (err > 1.0) {
        ++stats_.rejected;
        last_rejected = true;
        h_mag = std::abs(h) * fac;
        continue;
      }

      // Accepted.
      if (!ynew_.allFinite())
        throw IntegrationError(IntegrationFailure::NonFinite, t + h,
                               "state not finite after an accepted step");
      ++stats_.accepted;
      last_rejected = false;

      if (storage == DenseStorage::Full) {
        DenseTrajectory::Segment seg;
        seg.t_start = t;
        seg.h = h;
        seg.u_start = y_.head(m_);
        seg.u_end = ynew_.head(m_);
        seg.c2 = (ynew_ - y_).head(m_);
        seg.c3 = h * k1_.head(m_) - seg.c2;
        seg.c4 = seg.c2 - h * k7_.head(m_) - seg.c3;
        seg.c5 = h * (d1 * k1_.head(m_) + d3 * k3_.head(m_) + d4 * k4_.head(m_) +
                      d5 * k5_.head(m_) + d6 * k6_.head(m_) + d7 * k7_.head(m_));
        segs.push_back(std::move(seg));
      }

      y_.swap(ynew_);
      k1_.swap(k7_);  // FSAL
      t = hit ? target : t + h;

      double grown = std::abs(h) * fac;
      if (cfg_.max_step) grown = std::min(grown, *cfg_.max_step);
      // A step clamped to a target is no statement about accuracy: never let
      // it shrink the controller's proposal.
      h_mag = hit ? std::max(h_mag, grown) : grown;

      if (hit) {
        res.node_times.push_back(t);
        res.node_states.push_back(y_.head(m_));
        if (++next_target == targets.size()) break;
      }
    }

    if (dir < 0) std::reverse(segs.begin(), segs.end());
    for (auto& s : segs) res.trajectory.append(std::move(s));
    res.final_state = y_.head(m_);
    res.quadratures = y_.tail(qdim_);
    res.stats = stats_;
    return res;
  }

 private:
  const RhsFn& rhs_;
  int m_, qdim_;
  const QuadratureSpec* quad_;
  const SolverConfig& cfg_;
  int n_, nerr_;
  StepStats stats_;
  Vector u_buf_, du_buf_;
  Vector k1_, k2_, k3_, k4_, k5_, k6_, k7_;
  Vector y_, ynew_, ystage_, err_vec_;
};

}  // namespace

IntegrationResult integrate(const RhsFn& rhs, const Vector& u0, double t_a,
                            double t_b, const std::vector<double>& stops,
                            const SolverConfig& cfg,
                            const QuadratureSpec* quadrature,
                            DenseStorage storage) {
  cfg.validate();
  if (!rhs) throw std::invalid_argument("integrate: rhs is empty");
  if (u0.size() == 0) throw std::invalid_argument("integrate: empty state");
  if (!u0.allFinite())
    throw std::invalid_argument("integrate: initial state not finite");
  if (!(std::isfinite(t_a) && std::isfinite(t_b)) || t_a == t_b)
    throw std::invalid_argument("integrate: span must have nonzero length");
  if (quadrature && (quadrature->dim < 1 || !quadrature->integrand))
    throw std::invalid_argument("integrate: malformed quadrature spec");

  const double dir = t_b > t_a ? 1.0 : -1.0;
  double prev = t_a;
  for (double s : stops) {
    if (!std::isfinite(s) || dir * s <= dir * prev || dir * s >= dir * t_b)
      throw std::invalid_argument(
          "integrate: stops must be strictly monotone and strictly inside the span");
    prev = s;
  }

  Stepper stepper(rhs, static_cast<int>(u0.size()), quadrature, cfg);
  return stepper.run(u0, t_a, t_b, stops, storage);
}

}  // namespace odelik
