// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "ilac/linalg.hpp"

namespace ilac {

std::uint64_t splitmix64(std::uint64_t x);

// Child seed for a path of indices below a master seed. Substreams are
// independent of worker count and scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return uni_(engine_); }
  double normal() { return norm_(engine_); }
  double phase() { return 2.0 * kPi * uniform(); }
  cd unit_phasor() { return std::polar(1.0, phase()); }
  cd complex_normal(double variance);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uni_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

// Draw from N(mean, cov) for a PSD covariance. Zero directions stay exact.
Vec3 sample_gaussian3(const Vec3& mean, const Mat3& cov, Rng& rng);

}  // namespace ilac
