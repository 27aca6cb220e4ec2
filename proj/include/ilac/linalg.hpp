// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ilac {

using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cd kJ{0.0, 1.0};

struct DegenerateGeometry : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidUncertainty : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

Mat kron(const Mat& a, const Mat& b);

// Column-major vectorization and its inverse.
Vec vec(const Mat& m);
Mat unvec(const Vec& v, Eigen::Index rows, Eigen::Index cols);

Mat hermitian_part(const Mat& m);

// Symmetrize, eigendecompose, clip negative eigenvalues to zero.
Mat psd_repair(const Mat& m);

double min_eigenvalue_hermitian(const Mat& m);
double min_eigenvalue_symmetric(const RMat& m);

// log2 det of a Hermitian positive definite matrix.
double log2det_hpd(const Mat& m);

// Solves A X = B for Hermitian PSD A. Adds jitter 1e-12 * trace to the
// diagonal when the matrix is close to singular.
Mat hermitian_solve(const Mat& a, const Mat& b);
Mat hermitian_inverse(const Mat& a);

double relative_frobenius(const Mat& estimate, const Mat& reference);

}  // namespace ilac
