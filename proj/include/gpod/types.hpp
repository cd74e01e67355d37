#pragma once

#include <Eigen/Dense>

namespace gpod {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace gpod
