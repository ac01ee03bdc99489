#pragma once

#include <Eigen/Dense>

namespace wmr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace wmr
