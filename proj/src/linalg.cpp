// SPDX-License-Identifier: Apache-2.0
#include "ilac/linalg.hpp"

#include <cmath>

namespace ilac {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vec vec(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

Mat unvec(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw InvalidArgument("unvec: size mismatch");
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

Mat hermitian_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

Mat psd_repair(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(m));
  RVec ev = es.eigenvalues().cwiseMax(0.0);
  Mat out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  return hermitian_part(out);
}

double min_eigenvalue_hermitian(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double min_eigenvalue_symmetric(const RMat& m) {
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double log2det_hpd(const Mat& m) {
  Eigen::LLT<Mat> llt(hermitian_part(m));
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      s += std::log2(std::max(es.eigenvalues()(i), 1e-300));
    return s;
  }
  double s = 0.0;
  const Mat& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) s += std::log2(std::real(l(i, i)));
  return 2.0 * s;
}

Mat hermitian_solve(const Mat& a, const Mat& b) {
  Mat h = hermitian_part(a);
  Eigen::LDLT<Mat> ldlt(h);
  bool ok = ldlt.info() == Eigen::Success;
  if (ok) {
    RVec d = ldlt.vectorD().real().cwiseAbs();
    double dmax = d.maxCoeff(), dmin = d.minCoeff();
    ok = dmin > 0.0 && dmax / dmin < 1e12;
  }
  if (!ok) {
    double tr = std::max(std::abs(h.trace().real()), 1e-300);
    h.diagonal().array() += 1e-12 * tr;
    ldlt.compute(h);
  }
  return ldlt.solve(b);
}

Mat hermitian_inverse(const Mat& a) {
  return hermitian_solve(a, Mat::Identity(a.rows(), a.cols()));
}

double relative_frobenius(const Mat& estimate, const Mat& reference) {
  return (estimate - reference).norm() / reference.norm();
}

}  // namespace ilac
