#pragma once

#include <Eigen/Dense>

namespace odelik {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace odelik
