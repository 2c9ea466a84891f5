#include "odelik/models_builtin.hpp"

#include <cmath>
#include <stdexcept>

namespace odelik {

void ModelSpec::validate() const {
  if (state_dim < 1 || param_dim < 1)
    throw std::invalid_argument("ModelSpec: dimensions must be positive");
  if (!(horizon > 0) || !std::isfinite(horizon))
    throw std::invalid_argument("ModelSpec: horizon must be positive");
  if (!rhs || !jac_state || !jac_params || !hess_params_params ||
      !hess_params_state || !hess_state_state || !init_state || !init_jac ||
      !init_hess)
    throw std::invalid_argument("ModelSpec: every callback must be set");
}

void ModelSpec::check_params(const Vector& theta) const {
  if (theta.size() != param_dim)
    throw std::invalid_argument("ModelSpec: theta has wrong length");
  if (!theta.allFinite())
    throw std::invalid_argument("ModelSpec: theta must be finite");
}

ModelSpec make_linear_diagonal(int p, double horizon) {
  if (p < 1) throw std::invalid_argument("make_linear_diagonal: p must be >= 1");
  ModelSpec m;
  m.name = "linear";
  m.state_dim = p;
  m.param_dim = p;
  m.horizon = horizon;

  m.rhs = [](double, const Vector& u, const Vector& th) -> Vector {
    return th.cwiseProduct(u);
  };
  m.jac_state = [](double, const Vector&, const Vector& th) -> Matrix {
    return th.asDiagonal();
  };
  m.jac_params = [](double, const Vector& u, const Vector&) -> Matrix {
    return Matrix(u.asDiagonal());
  };
  m.hess_params_params = [p](double, const Vector&, const Vector&,
                             const Vector&, const Vector&) -> Vector {
    return Vector::Zero(p);
  };
  // Only ∂²f_i/∂θ_i∂u_i = 1 is nonzero.
  m.hess_params_state = [](double, const Vector&, const Vector&,
                           const Vector& a, const Vector& w) -> Vector {
    return a.cwiseProduct(w);
  };
  m.hess_state_state = [p](double, const Vector&, const Vector&, const Vector&,
                           const Vector&) -> Vector {
    return Vector::Zero(p);
  };
  m.init_state = [p](const Vector&) -> Vector { return Vector::Ones(p); };
  m.init_jac = [p](const Vector&) -> Matrix { return Matrix::Zero(p, p); };
  m.init_hess = [p](const Vector&, const Vector&, const Vector&) -> Vector {
    return Vector::Zero(p);
  };
  m.validate();
  return m;
}

namespace {

// Parameter indices for the HIV model.
enum : int {
  iLambda = 0,
  iGamma = 1,
  iMuNI = 2,
  iMuL = 3,
  iMuA = 4,
  iMuV = 5,
  iProd = 6,  // virion production rate p
  iAlphaL = 7,
  iPi = 8,
  iEtaN = 9,  // reverse-transcriptase inhibitor efficacy
  iEtaP = 10  // protease inhibitor efficacy
};

}  // namespace

void hiv_check_params(const Vector& th) {
  if (th.size() != 11)
    throw std::invalid_argument("hiv: theta must have length 11");
  if (!th.allFinite())
    throw std::invalid_argument("hiv: theta must be finite");
  for (int i : {iEtaN, iEtaP}) {
    if (!(th[i] >= 0.0 && th[i] < 1.0))
      throw std::invalid_argument(
          "hiv: drug efficacies must lie in [0, 1); 1.0 would shut the "
          "corresponding pathway off entirely");
  }
}

ModelSpec make_hiv(const Vector& u0, double horizon) {
  if (u0.size() != 5)
    throw std::invalid_argument("make_hiv: u0 must have length 5");
  if (!u0.allFinite())
    throw std::invalid_argument("make_hiv: u0 must be finite");

  ModelSpec m;
  m.name = "hiv";
  m.state_dim = 5;
  m.param_dim = 11;
  m.horizon = horizon;

  m.rhs = [](double, const Vector& u, const Vector& th) -> Vector {
    const double q = (1.0 - th[iEtaN]) * th[iGamma] * u[0] * u[3];
    Vector f(5);
    f[0] = th[iLambda] - q - th[iMuNI] * u[0];
    f[1] = (1.0 - th[iPi]) * q - (th[iAlphaL] + th[iMuL]) * u[1];
    f[2] = th[iPi] * q + th[iAlphaL] * u[1] - th[iMuA] * u[2];
    f[3] = (1.0 - th[iEtaP]) * th[iProd] * u[2] - th[iMuV] * u[3];
    f[4] = th[iEtaP] * th[iProd] * u[2] - th[iMuV] * u[4];
    return f;
  };

  m.jac_state = [](double, const Vector& u, const Vector& th) -> Matrix {
    const double a = (1.0 - th[iEtaN]) * th[iGamma];
    const double qu1 = a * u[3];  // ∂q/∂T_NI
    const double qu4 = a * u[0];  // ∂q/∂V_I
    Matrix J = Matrix::Zero(5, 5);
    J(0, 0) = -qu1 - th[iMuNI];
    J(0, 3) = -qu4;
    J(1, 0) = (1.0 - th[iPi]) * qu1;
    J(1, 1) = -(th[iAlphaL] + th[iMuL]);
    J(1, 3) = (1.0 - th[iPi]) * qu4;
    J(2, 0) = th[iPi] * qu1;
    J(2, 1) = th[iAlphaL];
    J(2, 2) = -th[iMuA];
    J(2, 3) = th[iPi] * qu4;
    J(3, 2) = (1.0 - th[iEtaP]) * th[iProd];
    J(3, 3) = -th[iMuV];
    J(4, 2) = th[iEtaP] * th[iProd];
    J(4, 4) = -th[iMuV];
    return J;
  };

  m.jac_params = [](double, const Vector& u, const Vector& th) -> Matrix {
    const double uu = u[0] * u[3];
    const double q = (1.0 - th[iEtaN]) * th[iGamma] * uu;
    const double q_gamma = (1.0 - th[iEtaN]) * uu;
    const double q_etaN = -th[iGamma] * uu;
    Matrix J = Matrix::Zero(5, 11);
    J(0, iLambda) = 1.0;
    J(0, iGamma) = -q_gamma;
    J(1, iGamma) = (1.0 - th[iPi]) * q_gamma;
    J(2, iGamma) = th[iPi] * q_gamma;
    J(0, iMuNI) = -u[0];
    J(1, iMuL) = -u[1];
    J(2, iMuA) = -u[2];
    J(3, iMuV) = -u[3];
    J(4, iMuV) = -u[4];
    J(3, iProd) = (1.0 - th[iEtaP]) * u[2];
    J(4, iProd) = th[iEtaP] * u[2];
    J(1, iAlphaL) = -u[1];
    J(2, iAlphaL) = u[1];
    J(1, iPi) = -q;
    J(2, iPi) = q;
    J(0, iEtaN) = -q_etaN;
    J(1, iEtaN) = (1.0 - th[iPi]) * q_etaN;
    J(2, iEtaN) = th[iPi] * q_etaN;
    J(3, iEtaP) = -th[iProd] * u[2];
    J(4, iEtaP) = th[iProd] * u[2];
    return J;
  };

  m.hess_params_params = [](double, const Vector& u, const Vector& th,
                            const Vector& ha, const Vector& hb) -> Vector {
    const double uu = u[0] * u[3];
    const double q_gamma = (1.0 - th[iEtaN]) * uu;
    const double q_etaN = -th[iGamma] * uu;
    // Symmetrized direction products for each parameter pair with a nonzero
    // second derivative.
    const double A = ha[iGamma] * hb[iEtaN] + ha[iEtaN] * hb[iGamma];
    const double B = ha[iPi] * hb[iGamma] + ha[iGamma] * hb[iPi];
    const double C = ha[iPi] * hb[iEtaN] + ha[iEtaN] * hb[iPi];
    const double D = ha[iProd] * hb[iEtaP] + ha[iEtaP] * hb[iProd];
    const double qAA = -uu * A;  // ∂²q/∂γ∂η_N contracted
    Vector w(5);
    w[0] = -qAA;
    w[1] = (1.0 - th[iPi]) * qAA - q_gamma * B - q_etaN * C;
    w[2] = th[iPi] * qAA + q_gamma * B + q_etaN * C;
    w[3] = -u[2] * D;
    w[4] = u[2] * D;
    return w;
  };

  m.hess_params_state = [](double, const Vector& u, const Vector& th,
                           const Vector& ha, const Vector& hu) -> Vector {
    const double a = (1.0 - th[iEtaN]) * th[iGamma];
    // Directional derivative of q's state gradient: q_u·hu and its parameter
    // derivatives.
    const double U = u[3] * hu[0] + u[0] * hu[3];
    const double QA = (ha[iGamma] * (1.0 - th[iEtaN]) - ha[iEtaN] * th[iGamma]) * U;
    const double qu = a * U;
    Vector w(5);
    w[0] = -QA - ha[iMuNI] * hu[0];
    w[1] = (1.0 - th[iPi]) * QA - ha[iPi] * qu - (ha[iMuL] + ha[iAlphaL]) * hu[1];
    w[2] = th[iPi] * QA + ha[iPi] * qu + ha[iAlphaL] * hu[1] - ha[iMuA] * hu[2];
    w[3] = (ha[iProd] * (1.0 - th[iEtaP]) - ha[iEtaP] * th[iProd]) * hu[2] -
           ha[iMuV] * hu[3];
    w[4] = (ha[iProd] * th[iEtaP] + ha[iEtaP] * th[iProd]) * hu[2] -
           ha[iMuV] * hu[4];
    return w;
  };

  m.hess_state_state = [](double, const Vector&, const Vector& th,
                          const Vector& hw, const Vector& hz) -> Vector {
    const double a = (1.0 - th[iEtaN]) * th[iGamma];
    // Only ∂²q/∂T_NI∂V_I = a is nonzero.
    const double V = a * (hw[0] * hz[3] + hw[3] * hz[0]);
    Vector w(5);
    w[0] = -V;
    w[1] = (1.0 - th[iPi]) * V;
    w[2] = th[iPi] * V;
    w[3] = 0.0;
    w[4] = 0.0;
    return w;
  };

  m.init_state = [u0](const Vector&) -> Vector { return u0; };
  m.init_jac = [](const Vector&) -> Matrix { return Matrix::Zero(5, 11); };
  m.init_hess = [](const Vector&, const Vector&, const Vector&) -> Vector {
    return Vector::Zero(5);
  };
  m.validate();
  return m;
}

Vector hiv_reference_params() {
  Vector th(11);
  th << 2.61, 0.0021, 0.0085, 0.0092, 0.289, 30.0, 641.0, 1.6e-5, 0.443, 0.90,
      0.99;
  return th;
}

Vector hiv_default_init_state() {
  Vector u0(5);
  u0 << 300.0, 10.0, 10.0, 1000.0, 100.0;
  return u0;
}

Matrix hiv_observation_matrix() {
  Matrix P = Matrix::Zero(2, 5);
  P(0, 0) = P(0, 1) = P(0, 2) = 1.0;
  P(1, 3) = P(1, 4) = 1.0;
  return P;
}

namespace {

void check_linear_oracle_args(const Vector& theta,
                              const std::vector<double>& times,
                              const Matrix& data) {
  const auto n = static_cast<Eigen::Index>(times.size());
  if (n == 0) throw std::invalid_argument("linear oracle: no observation times");
  if (data.rows() != n || data.cols() != theta.size())
    throw std::invalid_argument(
        "linear oracle: data must be n_obs × p, matching theta");
}

}  // namespace

Vector exact_gradient_linear(const Vector& theta,
                             const std::vector<double>& times,
                             const Matrix& data) {
  check_linear_oracle_args(theta, times, data);
  Vector g = Vector::Zero(theta.size());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double t = times[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      const double e = std::exp(theta[k] * t);
      g[k] += (data(i, k) - e) * e * t;
    }
  }
  return g;
}

Matrix exact_hessian_linear(const Vector& theta,
                            const std::vector<double>& times,
                            const Matrix& data) {
  check_linear_oracle_args(theta, times, data);
  Matrix H = Matrix::Zero(theta.size(), theta.size());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double t = times[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      const double e = std::exp(theta[k] * t);
      const double fisher = -(e * t) * (e * t);
      const double residual = (data(i, k) - e) * e * t * t;
      H(k, k) += fisher + residual;
    }
  }
  return H;
}

}  // namespace odelik
