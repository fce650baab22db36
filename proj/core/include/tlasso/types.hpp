#pragma once

#include <Eigen/Dense>

namespace tlasso {

using Vector = Eigen::VectorXd;
/// Sensing matrices are dense and row-major: one measurement per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace tlasso
