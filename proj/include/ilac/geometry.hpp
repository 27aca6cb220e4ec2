// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ilac/linalg.hpp"

namespace ilac {

// Uniform planar array in the local x-y plane, centred on the origin.
class ArrayLayout {
 public:
  ArrayLayout(int n_x, int n_y, double spacing);

  int n_x() const { return n_x_; }
  int n_y() const { return n_y_; }
  int size() const { return n_x_ * n_y_; }
  double spacing() const { return spacing_; }

  // Element positions, one row per element, row (i_x * n_y + i_y).
  const Eigen::MatrixX3d& positions() const { return q_; }

 private:
  int n_x_;
  int n_y_;
  double spacing_;
  Eigen::MatrixX3d q_;
};

struct Pose {
  Vec3 position = Vec3::Zero();
  Mat3 orientation = Mat3::Identity();  // rows are local axes in global coordinates

  // Throws InvalidArgument when orientation is not in SO(3) within tol.
  void validate(double tol = 1e-12) const;
};

struct AnglePair {
  double elevation = 0.0;
  double azimuth = 0.0;
};

struct Direction {
  AnglePair angles;
  double range = 0.0;
};

Direction local_direction(const Pose& observer, const Vec3& target);

// Unit vector for (elevation, azimuth) and its partial derivatives.
Vec3 unit_vector(const AnglePair& a);
Vec3 unit_vector_d_elevation(const AnglePair& a);
Vec3 unit_vector_d_azimuth(const AnglePair& a);

Vec steering_vector(const ArrayLayout& layout, const AnglePair& angles, double wavelength);

double unit_cell_pattern(const AnglePair& angles, double q_exponent);

// Rows: d(elevation)/d(target), d(azimuth)/d(target) in global coordinates.
Eigen::Matrix<double, 2, 3> angle_jacobian(const Pose& observer, const Vec3& target);

}  // namespace ilac
