// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <stdexcept>

#include "ilac/kernels.hpp"
#include "support.hpp"

using namespace ilac;
using ilac::test::random_phases;
using ilac::test::small_scenario;

namespace {

Mat3 planar_cov(double v) {
  Mat3 c = Mat3::Zero();
  c(0, 0) = c(1, 1) = v;
  return c;
}

}  // namespace

TEST_CASE("parallel marginal moments are bitwise identical to the serial reference") {
  Scenario sc = small_scenario();
  ChannelModel model(sc);
  Rng rng(1);
  std::vector<RisProfile> b{random_phases(16, rng), random_phases(16, rng)};
  for (int n : {1, 31, 32, 33, 100, 257}) {
    ChannelStats ref = kernels::marginal_moments_serial(model, b, 1, sc.ue[1].pose.position,
                                                        planar_cov(0.5), n, 99);
    for (int w : {1, 2, 3, 8}) {
      ChannelStats par = kernels::marginal_moments_parallel(
          model, b, 1, sc.ue[1].pose.position, planar_cov(0.5), n, 99, w);
      CHECK(par.mean == ref.mean);
      CHECK(par.covariance == ref.covariance);
    }
  }
}

TEST_CASE("marginal moments with zero covariance equal the pointwise statistics") {
  Scenario sc = small_scenario();
  ChannelModel model(sc);
  Rng rng(2);
  std::vector<RisProfile> b{random_phases(16, rng), random_phases(16, rng)};
  ChannelStats at = model.composed_stats(b, 0, sc.ue[0].pose.position);
  ChannelStats m = kernels::marginal_moments_serial(model, b, 0, sc.ue[0].pose.position,
                                                    Mat3::Zero(), 70, 5);
  CHECK((m.mean - at.mean).norm() < 1e-12 * at.mean.norm());
  CHECK(relative_frobenius(m.covariance, at.covariance) < 1e-9);
}

TEST_CASE("for_each_index visits every index once and propagates exceptions") {
  for (int w : {1, 2, 5}) {
    std::vector<int> hits(100, 0);
    kernels::for_each_index(100, w, [&](int i) { ++hits[i]; });
    for (int h : hits) CHECK(h == 1);
    std::atomic<int> count{0};
    CHECK_THROWS_AS(kernels::for_each_index(50, w,
                                            [&](int i) {
                                              ++count;
                                              if (i == 17) throw std::runtime_error("boom");
                                            }),
                    std::runtime_error);
  }
  kernels::for_each_index(0, 4, [](int) { FAIL("no work expected"); });
}
