// SPDX-License-Identifier: Apache-2.0
#include "ilac/random.hpp"

#include <cmath>

namespace ilac {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(master);
  for (auto p : path) s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

cd Rng::complex_normal(double variance) {
  if (variance <= 0.0) return {0.0, 0.0};
  double s = std::sqrt(variance / 2.0);
  double re = normal();
  double im = normal();
  return {s * re, s * im};
}

Vec3 sample_gaussian3(const Vec3& mean, const Mat3& cov, Rng& rng) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (cov + cov.transpose()));
  if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, cov.trace()))
    throw InvalidUncertainty("position covariance is not positive semidefinite");
  Vec3 z;
  for (int i = 0; i < 3; ++i) z(i) = rng.normal();
  Vec3 scaled = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cwiseProduct(z);
  Vec3 out = mean + es.eigenvectors() * scaled;
  // keep coordinates with zero variance exact
  for (int i = 0; i < 3; ++i)
    if (cov(i, i) == 0.0) out(i) = mean(i);
  return out;
}

}  // namespace ilac
