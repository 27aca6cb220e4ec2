// SPDX-License-Identifier: Apache-2.0
#include "ilac/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ilac {

ArrayLayout::ArrayLayout(int n_x, int n_y, double spacing)
    : n_x_(n_x), n_y_(n_y), spacing_(spacing) {
  if (n_x < 1 || n_y < 1) throw InvalidArgument("array dimensions must be positive");
  if (!(spacing > 0.0)) throw InvalidArgument("array spacing must be positive");
  q_.resize(size(), 3);
  for (int ix = 0; ix < n_x; ++ix) {
    for (int iy = 0; iy < n_y; ++iy) {
      int row = ix * n_y + iy;
      q_(row, 0) = ix * spacing - (n_x - 1) * spacing / 2.0;
      q_(row, 1) = iy * spacing - (n_y - 1) * spacing / 2.0;
      q_(row, 2) = 0.0;
    }
  }
}

void Pose::validate(double tol) const {
  Mat3 g = orientation.transpose() * orientation - Mat3::Identity();
  if (g.cwiseAbs().maxCoeff() > tol)
    throw InvalidArgument("orientation is not orthogonal");
  if (std::abs(orientation.determinant() - 1.0) > tol)
    throw InvalidArgument("orientation determinant is not +1");
}

Direction local_direction(const Pose& observer, const Vec3& target) {
  Vec3 v = observer.orientation * (target - observer.position);
  double r = v.norm();
  if (!(r > 0.0)) throw DegenerateGeometry("target coincides with observer position");
  Direction d;
  d.range = r;
  d.angles.elevation = std::acos(std::clamp(v(2) / r, -1.0, 1.0));
  double s = std::hypot(v(0), v(1));
  d.angles.azimuth = (s > 0.0) ? std::atan2(v(1), v(0)) : 0.0;
  if (d.angles.azimuth == -kPi) d.angles.azimuth = kPi;
  return d;
}

Vec3 unit_vector(const AnglePair& a) {
  double se = std::sin(a.elevation), ce = std::cos(a.elevation);
  return {se * std::cos(a.azimuth), se * std::sin(a.azimuth), ce};
}

Vec3 unit_vector_d_elevation(const AnglePair& a) {
  double se = std::sin(a.elevation), ce = std::cos(a.elevation);
  return {ce * std::cos(a.azimuth), ce * std::sin(a.azimuth), -se};
}

Vec3 unit_vector_d_azimuth(const AnglePair& a) {
  double se = std::sin(a.elevation);
  return {-se * std::sin(a.azimuth), se * std::cos(a.azimuth), 0.0};
}

Vec steering_vector(const ArrayLayout& layout, const AnglePair& angles, double wavelength) {
  if (!(wavelength > 0.0)) throw InvalidArgument("wavelength must be positive");
  Vec3 u = unit_vector(angles);
  Eigen::VectorXd phase = layout.positions() * u;
  double k = 2.0 * kPi / wavelength;
  Vec a(layout.size());
  for (int i = 0; i < layout.size(); ++i) a(i) = std::polar(1.0, k * phase(i));
  return a;
}

double unit_cell_pattern(const AnglePair& angles, double q_exponent) {
  if (!(q_exponent > 0.0)) throw InvalidArgument("pattern exponent must be positive");
  if (angles.elevation > kPi / 2.0) return 0.0;
  double c = std::cos(angles.elevation);
  return c <= 0.0 ? 0.0 : std::pow(c, q_exponent);
}

Eigen::Matrix<double, 2, 3> angle_jacobian(const Pose& observer, const Vec3& target) {
  Vec3 v = observer.orientation * (target - observer.position);
  double r2 = v.squaredNorm();
  double s2 = v(0) * v(0) + v(1) * v(1);
  if (!(s2 > 0.0)) throw DegenerateGeometry("angle jacobian undefined at boresight");
  double s = std::sqrt(s2);
  Eigen::Matrix<double, 2, 3> dv;
  dv << v(0) * v(2) / (r2 * s), v(1) * v(2) / (r2 * s), -s / r2,
      -v(1) / s2, v(0) / s2, 0.0;
  return dv * observer.orientation;
}

}  // namespace ilac
