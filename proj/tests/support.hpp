// SPDX-License-Identifier: Apache-2.0
// Small scenarios shared by the unit tests.
#pragma once

#include <string>

#include "ilac/channel.hpp"
#include "ilac/random.hpp"
#include "ilac/scenario.hpp"

namespace ilac::test {

inline Mat3 rows(double a, double b, double c, double d, double e, double f, double g, double h,
                 double i) {
  return (Mat3() << a, b, c, d, e, f, g, h, i).finished();
}

// Two walls, a BS looking along -x and UEs on the floor, as in the full-scale
// deployment but with small arrays.
inline Scenario small_scenario(int bs_x = 2, int bs_y = 2, int ris_x = 4, int ris_y = 4,
                               int ue_x = 2, int ue_y = 1, int n_ris = 2, int n_ue = 2,
                               double kappa = 10.0) {
  Scenario sc;
  sc.rf.carrier_hz = 28e9;
  sc.rf.wavelength = 299792458.0 / sc.rf.carrier_hz;
  sc.rf.pathloss_alpha = 2.0;
  sc.rf.noise_variance = noise_variance_watts(5.0, -169.0, 120e3);
  const double d = sc.rf.wavelength / 2;
  sc.bs.position = Vec3(60, 15, 2);
  sc.bs.orientation = rows(0, -1, 0, 0, 0, 1, -1, 0, 0);
  sc.bs_layout = ArrayLayout(bs_x, bs_y, d);
  const Vec3 ris_pos[2] = {Vec3(0, 15, 3), Vec3(15, 20, 3)};
  const Mat3 ris_or[2] = {rows(0, 1, 0, 0, 0, 1, 1, 0, 0), rows(1, 0, 0, 0, 0, 1, 0, -1, 0)};
  for (int k = 0; k < n_ris; ++k) {
    RisNode r;
    r.pose.position = ris_pos[k];
    r.pose.orientation = ris_or[k];
    r.layout = ArrayLayout(ris_x, ris_y, d);
    sc.ris.push_back(r);
  }
  const Vec3 ue_pos[2] = {Vec3(10, 5, 0), Vec3(25, 10, 0)};
  sc.total_power = 1e-3;
  for (int i = 0; i < n_ue; ++i) {
    UeNode u;
    u.pose.position = ue_pos[i];
    u.layout = ArrayLayout(ue_x, ue_y, d);
    u.kappa.assign(n_ris, kappa);
    u.direct_nlos_variance = 1e-13;
    u.power_budget = sc.total_power / n_ue;
    sc.ue.push_back(u);
  }
  return sc;
}

inline Mat random_mat(Eigen::Index r, Eigen::Index c, Rng& rng, double var = 1.0) {
  Mat m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.complex_normal(var);
  return m;
}

inline Vec random_phases(Eigen::Index n, Rng& rng) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.unit_phasor();
  return v;
}

inline Mat random_hpd(Eigen::Index n, Rng& rng, double ridge = 0.1) {
  Mat a = random_mat(n, n, rng);
  return a * a.adjoint() + ridge * Mat::Identity(n, n);
}

inline Mat empirical_covariance(const std::vector<Vec>& xs, Vec* mean_out = nullptr) {
  Vec m = Vec::Zero(xs.front().size());
  for (const Vec& x : xs) m += x;
  m /= static_cast<double>(xs.size());
  Mat c = Mat::Zero(m.size(), m.size());
  for (const Vec& x : xs) c += (x - m) * (x - m).adjoint();
  c /= static_cast<double>(xs.size() - 1);
  if (mean_out) *mean_out = m;
  return c;
}

inline std::string scenario_path(const std::string& name) {
  return std::string(ILAC_SCENARIO_DIR) + "/" + name;
}

}  // namespace ilac::test
