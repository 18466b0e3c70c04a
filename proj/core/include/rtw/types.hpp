#pragma once

#include <Eigen/Core>

namespace rtw {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// One discrete trajectory. Row t holds the ambient coordinates of sample t.
using Signal = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using VecRef = Eigen::Ref<Vec>;
using ConstVecRef = Eigen::Ref<const Vec>;

}  // namespace rtw
