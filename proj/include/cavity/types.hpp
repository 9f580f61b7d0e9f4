#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace cavity {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3c = Eigen::Matrix3cd;

using SparseC = Eigen::SparseMatrix<Complex>;
using SparseR = Eigen::SparseMatrix<double>;
using DenseC = Eigen::MatrixXcd;
using DenseR = Eigen::MatrixXd;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;

/// Speed of light in vacuum (m/s).
inline constexpr double kSpeedOfLight = 299792458.0;

}  // namespace cavity
