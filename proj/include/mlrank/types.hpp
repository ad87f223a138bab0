#pragma once

#include <Eigen/Core>

namespace mlrank {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowMatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = MatrixX<double>;
using RowMatrixXd = RowMatrixX<double>;
using VectorXd = VectorX<double>;

// Label vectors hold entries in {-1, +1}.
using LabelVector = Eigen::VectorXi;
using LabelMatrix = RowMatrixX<int>;

} // namespace mlrank
