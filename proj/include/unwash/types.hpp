#pragma once

#include <Eigen/Dense>

namespace unwash {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using IVec = Eigen::VectorXi;

}  // namespace unwash
