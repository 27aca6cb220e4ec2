// SPDX-License-Identifier: Apache-2.0
#include "ilac/localization.hpp"

#include <cmath>
#include <string>

namespace ilac {

Phase1Pilots Phase1Pilots::prefix(int n) const {
  if (n % 2 != 0 || n < 0 || n > n_slots())
    throw InvalidArgument("pilot prefix must be even and within the sequence");
  Phase1Pilots p;
  p.symbol = symbol;
  p.slots.assign(slots.begin(), slots.begin() + n);
  return p;
}

Phase1Pilots Phase1Pilots::repeated(int times) const {
  Phase1Pilots p;
  p.symbol = symbol;
  for (int r = 0; r < times; ++r) p.slots.insert(p.slots.end(), slots.begin(), slots.end());
  return p;
}

Phase1Pilots make_phase1_pilots(const Scenario& sc, int n_slots, Rng& rng) {
  if (n_slots <= 0 || n_slots % 2 != 0)
    throw InvalidArgument("phase-1 pilot count must be positive and even");
  Phase1Pilots p;
  p.symbol = Vec::Constant(sc.n_bs(), cd(std::sqrt(sc.total_power / sc.n_bs()), 0.0));
  for (int m = 0; m < n_slots / 2; ++m) {
    std::vector<RisProfile> first;
    for (int k = 0; k < sc.n_ris(); ++k) {
      RisProfile b(sc.ris[k].layout.size());
      for (Eigen::Index q = 0; q < b.size(); ++q) b(q) = rng.unit_phasor();
      first.push_back(b);
    }
    std::vector<RisProfile> second;
    for (const auto& b : first) second.push_back(-b);
    p.slots.push_back(std::move(first));
    p.slots.push_back(std::move(second));
  }
  return p;
}

std::vector<Vec> difference_observations(const std::vector<Vec>& y) {
  if (y.size() % 2 != 0) throw InvalidArgument("observation count must be even");
  std::vector<Vec> out;
  for (std::size_t t = 0; t + 1 < y.size(); t += 2) out.push_back(0.5 * (y[t] - y[t + 1]));
  return out;
}

double effective_noise_variance(const ChannelModel& model, const Vec& x, int ue,
                                const Vec3& position) {
  const Scenario& sc = model.scenario();
  double si = 0.0;
  for (int k = 0; k < sc.n_ris(); ++k) {
    const BsRisLink& bl = model.bs_link(k);
    double hx = std::norm(bl.gain) * bl.a_ris.squaredNorm() *
                std::norm((bl.a_bs.transpose() * x)(0));
    si += hx * model.ue_link(k, ue, position).nlos_variance;
  }
  return 0.5 * (sc.rf.noise_variance + si);
}

RVec ChannelParams::pack() const {
  const int k = static_cast<int>(aod.size());
  RVec eta(6 * k);
  for (int r = 0; r < k; ++r) {
    eta(2 * r) = aod[r].elevation;
    eta(2 * r + 1) = aod[r].azimuth;
    eta(2 * k + 2 * r) = aoa[r].elevation;
    eta(2 * k + 2 * r + 1) = aoa[r].azimuth;
    eta(4 * k + 2 * r) = gain[r].real();
    eta(4 * k + 2 * r + 1) = gain[r].imag();
  }
  return eta;
}

ChannelParams ChannelParams::unpack(const RVec& eta, int n_ris) {
  if (eta.size() != 6 * n_ris) throw InvalidArgument("parameter vector length must be 6K");
  ChannelParams p;
  for (int r = 0; r < n_ris; ++r) {
    p.aod.push_back({eta(2 * r), eta(2 * r + 1)});
    p.aoa.push_back({eta(2 * n_ris + 2 * r), eta(2 * n_ris + 2 * r + 1)});
    p.gain.emplace_back(eta(4 * n_ris + 2 * r), eta(4 * n_ris + 2 * r + 1));
  }
  return p;
}

ChannelParams true_channel_params(const ChannelModel& model, int ue, const Vec3& position) {
  ChannelParams p;
  for (int k = 0; k < model.scenario().n_ris(); ++k) {
    RisUeLink l = model.ue_link(k, ue, position);
    p.aod.push_back(l.aod_ris);
    p.aoa.push_back(l.aoa_ue);
    p.gain.push_back(l.los_gain);
  }
  return p;
}

namespace {

// Phase slope of a steering vector along a unit-vector derivative.
RVec phase_rate(const ArrayLayout& layout, const Vec3& du, double wavelength) {
  return (2.0 * kPi / wavelength) * (layout.positions() * du);
}

struct PairTerms {
  cd s;
  cd ds_el;
  cd ds_az;
};

// s_k for every pair plus angle derivatives.
std::vector<PairTerms> ris_terms(const ChannelModel& model, const Phase1Pilots& pilots, int k,
                                 const AnglePair& aod) {
  const Scenario& sc = model.scenario();
  const ArrayLayout& lay = sc.ris[k].layout;
  const BsRisLink& bl = model.bs_link(k);
  Vec a = steering_vector(lay, aod, sc.rf.wavelength);
  RVec rel = phase_rate(lay, unit_vector_d_elevation(aod), sc.rf.wavelength);
  RVec raz = phase_rate(lay, unit_vector_d_azimuth(aod), sc.rf.wavelength);
  cd c = bl.gain * (bl.a_bs.transpose() * pilots.symbol)(0);
  Vec base = a.cwiseProduct(bl.a_ris);
  std::vector<PairTerms> out(pilots.n_pairs());
  for (int m = 0; m < pilots.n_pairs(); ++m) {
    const RisProfile& b = pilots.slots[2 * m][k];
    cd s = 0.0, sel = 0.0, saz = 0.0;
    for (Eigen::Index q = 0; q < b.size(); ++q) {
      cd v = base(q) * b(q);
      s += v;
      sel += rel(q) * v;
      saz += raz(q) * v;
    }
    out[m] = {c * s, kJ * c * sel, kJ * c * saz};
  }
  return out;
}

}  // namespace

Mat phase1_means(const ChannelModel& model, const Phase1Pilots& pilots, int ue,
                 const ChannelParams& params) {
  const Scenario& sc = model.scenario();
  const int nu = sc.ue[ue].layout.size();
  Mat mu = Mat::Zero(nu, pilots.n_pairs());
  for (int k = 0; k < sc.n_ris(); ++k) {
    auto terms = ris_terms(model, pilots, k, params.aod[k]);
    Vec au = params.gain[k] * steering_vector(sc.ue[ue].layout, params.aoa[k], sc.rf.wavelength);
    for (int m = 0; m < pilots.n_pairs(); ++m) mu.col(m) += au * terms[m].s;
  }
  return mu;
}

std::vector<Mat> phase1_mean_gradients(const ChannelModel& model, const Phase1Pilots& pilots,
                                       int ue, const ChannelParams& params) {
  const Scenario& sc = model.scenario();
  const int nk = sc.n_ris();
  const int nu = sc.ue[ue].layout.size();
  const double lambda = sc.rf.wavelength;
  std::vector<Mat> grad(pilots.n_pairs(), Mat::Zero(nu, 6 * nk));
  for (int k = 0; k < nk; ++k) {
    auto terms = ris_terms(model, pilots, k, params.aod[k]);
    const ArrayLayout& ul = sc.ue[ue].layout;
    Vec au = steering_vector(ul, params.aoa[k], lambda);
    Vec dau_el = kJ * phase_rate(ul, unit_vector_d_elevation(params.aoa[k]), lambda)
                          .cast<cd>()
                          .cwiseProduct(au);
    Vec dau_az = kJ * phase_rate(ul, unit_vector_d_azimuth(params.aoa[k]), lambda)
                          .cast<cd>()
                          .cwiseProduct(au);
    cd g = params.gain[k];
    for (int m = 0; m < pilots.n_pairs(); ++m) {
      const PairTerms& t = terms[m];
      Mat& d = grad[m];
      d.col(2 * k) = g * t.ds_el * au;
      d.col(2 * k + 1) = g * t.ds_az * au;
      d.col(2 * nk + 2 * k) = g * t.s * dau_el;
      d.col(2 * nk + 2 * k + 1) = g * t.s * dau_az;
      d.col(4 * nk + 2 * k) = t.s * au;
      d.col(4 * nk + 2 * k + 1) = kJ * t.s * au;
    }
  }
  return grad;
}

RMat fim_channel_params(const ChannelModel& model, const Phase1Pilots& pilots, int ue,
                        const Vec3& position, double sigma2) {
  ChannelParams params = true_channel_params(model, ue, position);
  auto grads = phase1_mean_gradients(model, pilots, ue, params);
  const int n = 6 * model.scenario().n_ris();
  RMat j = RMat::Zero(n, n);
  for (const Mat& d : grads) j += (d.adjoint() * d).real();
  j *= 2.0 / sigma2;
  return 0.5 * (j + j.transpose());
}

RMat fim_channel_params(const ChannelModel& model, const Phase1Pilots& pilots, int ue,
                        const Vec3& position) {
  return fim_channel_params(model, pilots, ue, position,
                            effective_noise_variance(model, pilots.symbol, ue, position));
}

RMat position_jacobian(const ChannelModel& model, int ue, const Vec3& position) {
  const int nk = model.scenario().n_ris();
  RMat y = RMat::Zero(6 * nk, 4 * nk + 3);
  for (int k = 0; k < nk; ++k)
    y.block(2 * k, 0, 2, 3) = angle_jacobian(model.scenario().ris[k].pose, position);
  y.block(2 * nk, 3, 4 * nk, 4 * nk).setIdentity();
  (void)ue;
  return y;
}

RMat fim_position_params(const RMat& j_eta, const ChannelModel& model, int ue,
                         const Vec3& position) {
  RMat y = position_jacobian(model, ue, position);
  RMat j = y.transpose() * j_eta * y;
  return 0.5 * (j + j.transpose());
}

PositionError position_error_covariance(const RMat& j_zeta, bool planar) {
  std::vector<int> keep;
  for (int r = 0; r < j_zeta.rows(); ++r)
    if (!(planar && r == 2)) keep.push_back(r);
  const int n = static_cast<int>(keep.size());
  const int npos = planar ? 2 : 3;
  RMat j(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) j(a, b) = j_zeta(keep[a], keep[b]);

  RVec d(n);
  for (int a = 0; a < n; ++a) {
    if (!(j(a, a) > 0.0)) {
      if (a < npos)
        throw Unidentifiable("position coordinate carries no Fisher information", 1);
      d(a) = 1.0;
    } else {
      d(a) = 1.0 / std::sqrt(j(a, a));
    }
  }
  RMat js = d.asDiagonal() * j * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (js + js.transpose()));
  RVec ev = es.eigenvalues();
  double emax = ev.cwiseAbs().maxCoeff();
  RMat inv;
  if (ev.minCoeff() > 0.0 && emax / ev.minCoeff() <= 1e12) {
    inv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  } else {
    RVec pinv = RVec::Zero(n);
    int null_dim = 0;
    bool touches_position = false;
    for (int a = 0; a < n; ++a) {
      if (ev(a) > 1e-12 * emax) {
        pinv(a) = 1.0 / ev(a);
      } else {
        ++null_dim;
        if (es.eigenvectors().col(a).head(npos).norm() > 1e-6) touches_position = true;
      }
    }
    if (touches_position)
      throw Unidentifiable("position is not identifiable (null-space dimension " +
                               std::to_string(null_dim) + ")",
                           null_dim);
    inv = es.eigenvectors() * pinv.asDiagonal() * es.eigenvectors().transpose();
  }
  inv = d.asDiagonal() * inv * d.asDiagonal();
  PositionError out;
  for (int a = 0; a < npos; ++a)
    for (int b = 0; b < npos; ++b) out.sigma(keep[a], keep[b]) = inv(a, b);
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
  out.peb = std::sqrt(std::max(0.0, out.sigma.trace()));
  return out;
}

FimReport localize_bound(const ChannelModel& model, const Phase1Pilots& pilots, int ue,
                         const Vec3& position) {
  FimReport r;
  r.j_eta = fim_channel_params(model, pilots, ue, position);
  r.j_zeta = fim_position_params(r.j_eta, model, ue, position);
  PositionError pe = position_error_covariance(r.j_zeta, model.scenario().planar);
  r.sigma_pos = pe.sigma;
  r.peb = pe.peb;
  return r;
}

Vec3 sample_position_estimate(const Vec3& true_position, const Mat3& sigma, Rng& rng) {
  return sample_gaussian3(true_position, sigma, rng);
}

}  // namespace ilac
