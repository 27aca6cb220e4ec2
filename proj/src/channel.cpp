// SPDX-License-Identifier: Apache-2.0
#include "ilac/channel.hpp"

#include <cmath>

#include "ilac/kernels.hpp"

namespace ilac {

BsRisLink bs_ris_link(const Pose& bs, const ArrayLayout& bs_layout, const Pose& ris,
                      const ArrayLayout& ris_layout, const RfParams& rf) {
  BsRisLink l;
  Direction dep = local_direction(bs, ris.position);
  Direction arr = local_direction(ris, bs.position);
  l.aod_bs = dep.angles;
  l.aoa_ris = arr.angles;
  l.range = dep.range;
  double f = unit_cell_pattern(arr.angles, rf.pattern_q);
  double amp = std::sqrt(f * rf.tx_gain * rf.cell_gain) * rf.wavelength / (4.0 * kPi * l.range);
  l.gain = std::polar(amp, -2.0 * kPi * l.range / rf.wavelength);
  l.a_bs = steering_vector(bs_layout, dep.angles, rf.wavelength);
  l.a_ris = steering_vector(ris_layout, arr.angles, rf.wavelength);
  return l;
}

BsRisLink bs_ris_link(const Scenario& sc, int k) {
  return bs_ris_link(sc.bs, sc.bs_layout, sc.ris[k].pose, sc.ris[k].layout, sc.rf);
}

RisUeLink ris_ue_link(const Pose& ris, const ArrayLayout& ris_layout, const Pose& ue,
                      const ArrayLayout& ue_layout, double kappa, const RfParams& rf) {
  if (!(kappa >= 0.0)) throw InvalidArgument("Rician factor must be non-negative");
  RisUeLink l;
  Direction dep = local_direction(ris, ue.position);
  Direction arr = local_direction(ue, ris.position);
  l.aod_ris = dep.angles;
  l.aoa_ue = arr.angles;
  l.range = dep.range;
  l.kappa = kappa;
  double f = unit_cell_pattern(dep.angles, rf.pattern_q);
  l.rho = f * rf.rx_gain * rf.cell_gain * rf.wavelength * rf.wavelength /
          (16.0 * kPi * kPi * std::pow(l.range, rf.pathloss_alpha));
  if (std::isinf(kappa)) {
    l.nlos_variance = 0.0;
    l.los_gain = std::polar(std::sqrt(l.rho), -2.0 * kPi * l.range / rf.wavelength);
  } else {
    l.nlos_variance = l.rho / (kappa + 1.0);
    l.los_gain = std::polar(std::sqrt(kappa * l.rho / (kappa + 1.0)),
                            -2.0 * kPi * l.range / rf.wavelength);
  }
  l.a_ris = steering_vector(ris_layout, dep.angles, rf.wavelength);
  l.a_ue = steering_vector(ue_layout, arr.angles, rf.wavelength);
  return l;
}

RisUeLink ris_ue_link(const Scenario& sc, int k, int i, const Vec3& ue_position) {
  Pose ue = sc.ue[i].pose;
  ue.position = ue_position;
  return ris_ue_link(sc.ris[k].pose, sc.ris[k].layout, ue, sc.ue[i].layout, sc.ue[i].kappa[k],
                     sc.rf);
}

Mat sample_nlos(Eigen::Index rows, Eigen::Index cols, double variance, Rng& rng) {
  if (variance < 0.0) throw InvalidArgument("NLOS variance must be non-negative");
  Mat m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.complex_normal(variance);
  return m;
}

Mat cascaded_channel(const Mat& bs_ris, const Mat& ris_ue, const RisProfile& b) {
  if (ris_ue.cols() != b.size() || bs_ris.rows() != b.size())
    throw InvalidArgument("cascaded_channel: dimension mismatch");
  return ris_ue * b.asDiagonal() * bs_ris;
}

ChannelStats cascaded_stats(const Mat& bs_ris, const Mat& ris_ue_los, const RisProfile& b,
                            double nlos_variance) {
  const Eigen::Index nu = ris_ue_los.rows();
  ChannelStats s;
  s.mean = vec(cascaded_channel(bs_ris, ris_ue_los, b));
  Mat m = bs_ris.transpose() * b.cwiseAbs2().asDiagonal() * bs_ris.conjugate();
  s.covariance = nlos_variance * kron(m, Mat::Identity(nu, nu));
  return s;
}

ChannelModel::ChannelModel(const Scenario& sc) : sc_(&sc) {
  for (int k = 0; k < sc.n_ris(); ++k) bs_.push_back(bs_ris_link(sc, k));
}

ChannelStats ChannelModel::composed_stats(const std::vector<RisProfile>& profiles, int i,
                                          const Vec3& position) const {
  const Scenario& sc = *sc_;
  const int nb = sc.n_bs();
  const int nu = sc.ue[i].layout.size();
  ChannelStats s;
  s.mean = Vec::Zero(nb * nu);
  Mat a_cov = Mat::Zero(nb, nb);
  for (int k = 0; k < sc.n_ris(); ++k) {
    const BsRisLink& bl = bs_[k];
    RisUeLink ul = ue_link(k, i, position);
    const RisProfile& b = profiles[k];
    cd inner = (ul.a_ris.array() * b.array() * bl.a_ris.array()).sum();
    Mat h = (ul.los_gain * bl.gain * inner) * ul.a_ue * bl.a_bs.transpose();
    s.mean += vec(h);
    double w = ul.nlos_variance * std::norm(bl.gain) * b.cwiseAbs2().sum();
    a_cov += w * bl.a_bs * bl.a_bs.adjoint();
  }
  s.covariance = kron(a_cov, Mat::Identity(nu, nu));
  s.covariance.diagonal().array() += sc.ue[i].direct_nlos_variance;
  return s;
}

Mat ChannelModel::sample_channel(const std::vector<RisProfile>& profiles, int i,
                                 const Vec3& position, Rng& rng) const {
  const Scenario& sc = *sc_;
  const int nb = sc.n_bs();
  const int nu = sc.ue[i].layout.size();
  Mat h = sample_nlos(nu, nb, sc.ue[i].direct_nlos_variance, rng);
  for (int k = 0; k < sc.n_ris(); ++k) {
    const BsRisLink& bl = bs_[k];
    RisUeLink ul = ue_link(k, i, position);
    const RisProfile& b = profiles[k];
    // (H_los + H_nlos) Diag(b) a_ris g a_bs^T, evaluated through the P-vector
    Vec c = b.cwiseProduct(bl.a_ris);
    Vec y = ul.los_gain * ul.a_ue * (ul.a_ris.transpose() * c)(0);
    if (ul.nlos_variance > 0.0) {
      Mat nl = sample_nlos(nu, ul.a_ris.size(), ul.nlos_variance, rng);
      y += nl * c;
    }
    h += bl.gain * y * bl.a_bs.transpose();
  }
  return h;
}

ChannelStats composed_stats_at_position(const Scenario& sc,
                                        const std::vector<RisProfile>& profiles, int i,
                                        const Vec3& position) {
  return ChannelModel(sc).composed_stats(profiles, i, position);
}

ChannelStats marginal_stats(const Scenario& sc, const std::vector<RisProfile>& profiles, int i,
                            const Vec3& p_hat, const Mat3& cov, int n_samples, Rng& rng,
                            int workers) {
  if (n_samples < 1) throw InvalidArgument("marginal_stats: n_samples must be >= 1");
  Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (cov + cov.transpose()));
  if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, std::abs(cov.trace())))
    throw InvalidUncertainty("position covariance is not positive semidefinite");
  ChannelModel model(sc);
  if (cov.isZero(0.0)) return model.composed_stats(profiles, i, p_hat);
  std::uint64_t seed = rng.engine()();
  if (workers > 1)
    return kernels::marginal_moments_parallel(model, profiles, i, p_hat, cov, n_samples, seed,
                                              workers);
  return kernels::marginal_moments_serial(model, profiles, i, p_hat, cov, n_samples, seed);
}

}  // namespace ilac
