#pragma once

#include <Eigen/Dense>

namespace cafe {

// Row-major so that node rows h_u are contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace cafe
