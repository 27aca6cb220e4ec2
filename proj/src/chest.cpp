// SPDX-License-Identifier: Apache-2.0
#include "ilac/chest.hpp"

#include <algorithm>
#include <cmath>

namespace ilac {

Phase2Pilots design_pilots(int n_bs, int n_slots, double power, int n_ue_antennas) {
  if (n_bs < 1 || n_slots < 1 || n_ue_antennas < 1)
    throw InvalidArgument("pilot dimensions must be positive");
  if (!(power > 0.0)) throw InvalidArgument("pilot power must be positive");
  const int l = std::max(n_slots, n_bs);
  const double amp = std::sqrt(power / n_bs);
  Phase2Pilots p;
  p.x_p2.resize(n_bs, n_slots);
  for (int n = 0; n < n_bs; ++n)
    for (int t = 0; t < n_slots; ++t)
      p.x_p2(n, t) = std::polar(amp, -2.0 * kPi * static_cast<double>((n * t) % l) / l);
  p.lifted = kron(p.x_p2.transpose(), Mat::Identity(n_ue_antennas, n_ue_antennas));
  return p;
}

Vec observe(const Phase2Pilots& pilots, const Vec& h, double sigma2, Rng& rng) {
  Vec y = pilots.lifted * h;
  for (Eigen::Index r = 0; r < y.size(); ++r) y(r) += rng.complex_normal(sigma2);
  return y;
}

EstimationResult ml_estimate(const Phase2Pilots& pilots, const Vec& y, double sigma2) {
  if (pilots.x_p2.cols() < pilots.x_p2.rows())
    throw InvalidArgument("ML estimation needs at least N_B pilot slots; use LMMSE");
  const Mat& x = pilots.lifted;
  Mat g = x.adjoint() * x;
  Eigen::LDLT<Mat> ldlt(g);
  if (ldlt.info() != Eigen::Success) throw InvalidArgument("pilot Gram matrix is singular");
  EstimationResult r;
  r.tag = "ml";
  r.estimate = ldlt.solve(x.adjoint() * y);
  r.error_cov = hermitian_part(sigma2 * ldlt.solve(Mat::Identity(g.rows(), g.cols())));
  return r;
}

namespace {

Mat lmmse_gain(const Mat& x, const Mat& r, double sigma2) {
  Mat s = x * r * x.adjoint();
  s.diagonal().array() += sigma2;
  // Lambda = R X^H S^{-1} = (S^{-1} X R)^H
  return hermitian_solve(s, x * r).adjoint();
}

}  // namespace

EstimationResult lmmse_estimate(const Phase2Pilots& pilots, const Vec& y,
                                const ChannelStats& stats, double sigma2) {
  const Mat& x = pilots.lifted;
  const Mat& r = stats.covariance;
  Mat lam = lmmse_gain(x, r, sigma2);
  EstimationResult out;
  out.tag = "lmmse";
  out.estimate = lam * (y - x * stats.mean) + stats.mean;
  out.error_cov = hermitian_part(r - lam * x * r);
  return out;
}

Mat lmmse_error_covariance(const Phase2Pilots& pilots, const Mat& r, double sigma2) {
  Mat lam = lmmse_gain(pilots.lifted, r, sigma2);
  return hermitian_part(r - lam * pilots.lifted * r);
}

Mat lmmse_error_simplified(const Phase2Pilots& pilots, const Mat& r, double sigma2) {
  const Mat& x = pilots.lifted;
  Mat a = x.adjoint() * x * r;
  a.diagonal().array() += sigma2;
  // sigma2 R A^{-1} = sigma2 (A^{-H} R)^H, A^H = R X^H X + sigma2 I
  Mat sol = a.adjoint().partialPivLu().solve(r);
  return hermitian_part(sigma2 * sol.adjoint());
}

ErrorGap error_gap(const Mat& e_ml, const Mat& e_mmse) {
  ErrorGap g;
  g.delta = hermitian_part(e_ml - e_mmse);
  g.min_eigenvalue = min_eigenvalue_hermitian(g.delta);
  return g;
}

Mat error_gap_closed_form(const Phase2Pilots& pilots, const Mat& r, double sigma2) {
  const Mat& x = pilots.lifted;
  Mat g = x.adjoint() * x;
  Mat m = g * r * g + sigma2 * g;
  Eigen::LDLT<Mat> ldlt(hermitian_part(m));
  return hermitian_part(sigma2 * sigma2 * ldlt.solve(Mat::Identity(m.rows(), m.cols())));
}

double nmse(const Mat& error_cov, const Vec& h) {
  return error_cov.trace().real() / h.squaredNorm();
}

}  // namespace ilac
