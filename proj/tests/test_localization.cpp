// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ilac/localization.hpp"
#include "support.hpp"

using namespace ilac;
using ilac::test::random_mat;
using ilac::test::small_scenario;

namespace {

Scenario random_scenario(Rng& rng) {
  Scenario sc = small_scenario(2 + static_cast<int>(rng.uniform() * 3), 2,
                               3 + static_cast<int>(rng.uniform() * 4), 4, 2, 2, 2, 1,
                               1.0 + 60.0 * rng.uniform());
  sc.ue[0].pose.position = Vec3(5.0 + 25.0 * rng.uniform(), 2.0 + 15.0 * rng.uniform(), 0.0);
  return sc;
}

}  // namespace

TEST_CASE("pilot construction") {
  Scenario sc = small_scenario();
  Rng rng(1);
  Phase1Pilots p = make_phase1_pilots(sc, 6, rng);
  REQUIRE(p.n_slots() == 6);
  CHECK(p.n_pairs() == 3);
  CHECK(p.symbol.squaredNorm() == doctest::Approx(sc.total_power).epsilon(1e-12).scale(0));
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < sc.n_ris(); ++k) {
      CHECK((p.slots[2 * m][k] + p.slots[2 * m + 1][k]).norm() == 0.0);
      CHECK((p.slots[2 * m][k].cwiseAbs() - RVec::Ones(16)).norm() < 1e-14);
    }
  Phase1Pilots q = p.prefix(4);
  CHECK(q.n_slots() == 4);
  CHECK((q.slots[3][1] - p.slots[3][1]).norm() == 0.0);
  CHECK_THROWS_AS(p.prefix(3), InvalidArgument);
  CHECK_THROWS_AS(make_phase1_pilots(sc, 5, rng), InvalidArgument);
  Phase1Pilots r = p.repeated(2);
  CHECK(r.n_slots() == 12);
  CHECK((r.slots[7][0] - p.slots[1][0]).norm() == 0.0);
}

TEST_CASE("differencing removes the direct link") {
  CHECK_THROWS_AS(difference_observations(std::vector<Vec>(3, Vec::Zero(2))), InvalidArgument);
  auto z = difference_observations(std::vector<Vec>(4, Vec::Zero(2)));
  REQUIRE(z.size() == 2);
  CHECK(z[0].norm() == 0.0);

  Scenario sc = small_scenario();
  ChannelModel model(sc);
  Rng rng(3);
  Phase1Pilots p = make_phase1_pilots(sc, 8, rng);
  const int i = 1;
  const Vec3 pos = sc.ue[i].pose.position;
  Mat hd = random_mat(sc.ue[i].layout.size(), sc.n_bs(), rng, 1e-13);
  std::vector<Vec> y;
  for (int t = 0; t < p.n_slots(); ++t) {
    Vec v = hd * p.symbol;
    for (int k = 0; k < sc.n_ris(); ++k) {
      RisUeLink ul = model.ue_link(k, i, pos);
      v += cascaded_channel(model.bs_link(k).matrix(), ul.los_matrix(), p.slots[t][k]) * p.symbol;
    }
    y.push_back(v);
  }
  auto d = difference_observations(y);
  Mat mu = phase1_means(model, p, i, true_channel_params(model, i, pos));
  for (int m = 0; m < p.n_pairs(); ++m) {
    Vec ris_only = Vec::Zero(mu.rows());
    for (int k = 0; k < sc.n_ris(); ++k) {
      RisUeLink ul = model.ue_link(k, i, pos);
      ris_only += ul.los_matrix() * p.slots[2 * m][k].asDiagonal() * model.bs_link(k).matrix() *
                  p.symbol;
    }
    CHECK((d[m] - ris_only).norm() <= 1e-12 * ris_only.norm());
    CHECK((mu.col(m) - ris_only).norm() <= 1e-10 * ris_only.norm());
  }
}

TEST_CASE("effective noise variance") {
  Scenario sc = small_scenario();
  Rng rng(4);
  const Vec3 pos = sc.ue[0].pose.position;
  Vec x = random_mat(sc.n_bs(), 1, rng, 1e-4).col(0);
  {
    ChannelModel model(sc);
    double s = 0.0;
    for (int k = 0; k < sc.n_ris(); ++k) {
      Vec hx = model.bs_link(k).matrix() * x;
      s += hx.squaredNorm() * model.ue_link(k, 0, pos).nlos_variance;
    }
    CHECK(effective_noise_variance(model, x, 0, pos) ==
          doctest::Approx(0.5 * (sc.rf.noise_variance + s)).epsilon(1e-12).scale(0));
    CHECK(effective_noise_variance(model, Vec::Zero(sc.n_bs()), 0, pos) ==
          doctest::Approx(0.5 * sc.rf.noise_variance).epsilon(1e-15).scale(0));
  }
  Scenario los = sc;
  los.ue[0].kappa.assign(2, std::numeric_limits<double>::infinity());
  ChannelModel m2(los);
  CHECK(effective_noise_variance(m2, x, 0, pos) ==
        doctest::Approx(0.5 * sc.rf.noise_variance).epsilon(1e-15).scale(0));
}

TEST_CASE("parameter packing order") {
  ChannelParams p;
  p.aod = {{0.1, 0.2}, {0.3, 0.4}};
  p.aoa = {{0.5, 0.6}, {0.7, 0.8}};
  p.gain = {cd(0.9, 1.0), cd(1.1, 1.2)};
  RVec eta = p.pack();
  for (int r = 0; r < 12; ++r) CHECK(eta(r) == doctest::Approx(0.1 * (r + 1)).epsilon(1e-12).scale(0));
  ChannelParams q = ChannelParams::unpack(eta, 2);
  CHECK((q.pack() - eta).norm() == 0.0);
  CHECK_THROWS_AS(ChannelParams::unpack(eta, 3), InvalidArgument);
}

TEST_CASE("analytic mean gradients match central finite differences") {
  Rng rng(100);
  for (int trial = 0; trial < 20; ++trial) {
    Scenario sc = random_scenario(rng);
    ChannelModel model(sc);
    Phase1Pilots p = make_phase1_pilots(sc, 4, rng);
    const Vec3 pos = sc.ue[0].pose.position;
    ChannelParams params = true_channel_params(model, 0, pos);
    RVec eta = params.pack();
    auto grads = phase1_mean_gradients(model, p, 0, params);
    const int nk = sc.n_ris();
    for (int c = 0; c < eta.size(); ++c) {
      const double h = 1e-6;
      RVec ep = eta, em = eta;
      ep(c) += h;
      em(c) -= h;
      Mat fd = (phase1_means(model, p, 0, ChannelParams::unpack(ep, nk)) -
                phase1_means(model, p, 0, ChannelParams::unpack(em, nk))) /
               (2 * h);
      for (int m = 0; m < p.n_pairs(); ++m) {
        double err = (grads[m].col(c) - fd.col(m)).norm() / grads[m].col(c).norm();
        CHECK(err < 1e-5);
      }
    }
  }
}

TEST_CASE("position jacobian structure and finite differences") {
  Rng rng(200);
  for (int trial = 0; trial < 20; ++trial) {
    Scenario sc = random_scenario(rng);
    ChannelModel model(sc);
    const Vec3 pos = sc.ue[0].pose.position;
    const int nk = sc.n_ris();
    RMat y = position_jacobian(model, 0, pos);
    REQUIRE(y.rows() == 6 * nk);
    REQUIRE(y.cols() == 4 * nk + 3);
    CHECK((y.block(2 * nk, 3, 4 * nk, 4 * nk) - RMat::Identity(4 * nk, 4 * nk)).norm() == 0.0);
    CHECK(y.block(2 * nk, 0, 4 * nk, 3).norm() == 0.0);
    CHECK(y.block(0, 3, 2 * nk, 4 * nk).norm() == 0.0);
    Mat yc = y.cast<cd>();
    for (int c = 0; c < 3; ++c) {
      const double h = 1e-6;
      Vec3 pp = pos, pm = pos;
      pp(c) += h;
      pm(c) -= h;
      RVec fd = (true_channel_params(model, 0, pp).pack() - true_channel_params(model, 0, pm).pack())
                    .head(2 * nk) /
                (2 * h);
      Mat fdc = fd.cast<cd>();
      Mat an = yc.block(0, c, 2 * nk, 1);
      CHECK((an - fdc).norm() <= 1e-5 * an.norm());
    }
  }
}

TEST_CASE("FIM identities") {
  Scenario sc = small_scenario();
  ChannelModel model(sc);
  Rng rng(7);
  Phase1Pilots p = make_phase1_pilots(sc, 10, rng);
  const Vec3 pos = sc.ue[0].pose.position;

  RMat j1 = fim_channel_params(model, p, 0, pos);
  RMat j2 = fim_channel_params(model, p.repeated(2), 0, pos);
  CHECK((j2 - 2.0 * j1).norm() <= 1e-12 * j1.norm());
  CHECK((j1 - j1.transpose()).norm() == 0.0);
  CHECK(min_eigenvalue_symmetric(j1) >= -1e-8 * j1.trace());

  const double s2 = effective_noise_variance(model, p.symbol, 0, pos);
  Phase1Pilots scaled = p;
  const cd c(1.5, -0.5);
  scaled.symbol *= c;
  RMat js = fim_channel_params(model, scaled, 0, pos, s2);
  CHECK((js - std::norm(c) * j1).norm() <= 1e-12 * js.norm());

  RMat jz = fim_position_params(j1, model, 0, pos);
  CHECK(jz.rows() == 4 * sc.n_ris() + 3);
  CHECK(min_eigenvalue_symmetric(jz) >= -1e-8 * jz.trace());
  RMat y = position_jacobian(model, 0, pos);
  CHECK((jz - y.transpose() * j1 * y).norm() <= 1e-12 * jz.norm());
}

TEST_CASE("position error covariance from a block-diagonal FIM") {
  RMat j = RMat::Zero(11, 11);
  j.diagonal() << 4, 4, 0.01, 1, 2, 3, 4, 5, 6, 7, 8;
  j *= 1e6;
  PositionError full = position_error_covariance(j, false);
  CHECK(full.sigma(0, 0) == doctest::Approx(0.25e-6).epsilon(1e-12).scale(0));
  CHECK(full.sigma(1, 1) == doctest::Approx(0.25e-6).epsilon(1e-12).scale(0));
  CHECK(full.sigma(2, 2) == doctest::Approx(100e-6).epsilon(1e-12).scale(0));
  CHECK(full.peb == doctest::Approx(std::sqrt(100.5e-6)).epsilon(1e-12).scale(0));
  PositionError planar = position_error_covariance(j, true);
  CHECK(planar.sigma(2, 2) == 0.0);
  CHECK(planar.sigma.row(2).norm() == 0.0);
  CHECK(planar.peb == doctest::Approx(std::sqrt(0.5e-6)).epsilon(1e-12).scale(0));
}

TEST_CASE("position error covariance matches the 3x3 block of the inverse") {
  Rng rng(9);
  RMat a(7, 7);
  for (int r = 0; r < 49; ++r) a(r) = rng.normal();
  RMat j = a * a.transpose() + 0.1 * RMat::Identity(7, 7);
  RMat inv = j.inverse();
  PositionError pe = position_error_covariance(j, false);
  CHECK((pe.sigma - inv.topLeftCorner(3, 3)).norm() <= 1e-10 * inv.topLeftCorner(3, 3).norm());
  PositionError half = position_error_covariance(2.0 * j, false);
  CHECK(half.peb == doctest::Approx(pe.peb / std::sqrt(2.0)).epsilon(1e-12).scale(0));
}

TEST_CASE("singular FIMs") {
  RMat j = RMat::Identity(7, 7);
  j(0, 0) = 0.0;
  try {
    position_error_covariance(j, false);
    FAIL("expected Unidentifiable");
  } catch (const Unidentifiable& e) {
    CHECK(e.null_dimension >= 1);
  }
  // nuisance null space does not block the position bound
  RMat k = RMat::Identity(7, 7);
  k(5, 5) = 1.0;
  k(6, 6) = 1.0;
  k(5, 6) = k(6, 5) = 1.0;
  PositionError pe = position_error_covariance(k, false);
  CHECK((pe.sigma - Mat3::Identity()).norm() < 1e-10);
  // rank-deficient mixture of position and nuisance
  RMat m = RMat::Zero(7, 7);
  m.diagonal().setConstant(1.0);
  m(0, 3) = m(3, 0) = 1.0;
  m(3, 3) = 1.0;
  CHECK_THROWS_AS(position_error_covariance(m, false), Unidentifiable);
}

TEST_CASE("repeating the pilot set shrinks the PEB by 1/sqrt(2)") {
  Scenario sc = small_scenario();
  ChannelModel model(sc);
  Rng rng(11);
  Phase1Pilots p = make_phase1_pilots(sc, 10, rng);
  for (int i = 0; i < sc.n_ue(); ++i) {
    FimReport a = localize_bound(model, p, i, sc.ue[i].pose.position);
    FimReport b = localize_bound(model, p.repeated(2), i, sc.ue[i].pose.position);
    CHECK(std::abs(b.peb / a.peb - 1.0 / std::sqrt(2.0)) < 1e-9);
    CHECK(a.sigma_pos(2, 2) == 0.0);
  }
}

TEST_CASE("PEB is non-increasing over nested pilot sets and ordered in kappa") {
  const std::vector<double> kappas{1.0, 5.0, 50.0};
  std::vector<std::vector<double>> peb(kappas.size(), std::vector<double>(2));
  for (std::size_t q = 0; q < kappas.size(); ++q) {
    Scenario sc = small_scenario(4, 2, 8, 8, 2, 2, 2, 2, kappas[q]);
    ChannelModel model(sc);
    Rng rng(12);
    Phase1Pilots pool = make_phase1_pilots(sc, 120, rng);
    for (int i = 0; i < sc.n_ue(); ++i) {
      double last = std::numeric_limits<double>::infinity();
      for (int t = 10; t <= 120; t += 10) {
        double v = localize_bound(model, pool.prefix(t), i, sc.ue[i].pose.position).peb;
        CHECK(v <= last);
        last = v;
        if (t == 10) peb[q][i] = v;
      }
    }
  }
  for (int i = 0; i < 2; ++i) {
    CHECK(peb[0][i] > peb[1][i]);
    CHECK(peb[1][i] > peb[2][i]);
  }
}

TEST_CASE("position estimate draws") {
  Rng rng(13);
  const Vec3 p(10, 5, 0);
  CHECK((sample_position_estimate(p, Mat3::Zero(), rng) - p).norm() == 0.0);

  Mat3 prior = Mat3::Zero();
  prior(0, 0) = prior(1, 1) = 2.0;
  CHECK(std::sqrt(prior.trace()) == doctest::Approx(2.0).epsilon(1e-12).scale(0));

  Mat3 s;
  s << 0.3, 0.05, 0.0, 0.05, 0.2, 0.0, 0.0, 0.0, 0.0;
  const int n = 100000;
  std::vector<Vec3> d(n);
  Vec3 mean = Vec3::Zero();
  for (int t = 0; t < n; ++t) {
    d[t] = sample_position_estimate(p, s, rng);
    mean += d[t];
    CHECK(d[t].z() == 0.0);
  }
  mean /= n;
  Mat3 c = Mat3::Zero();
  for (const auto& v : d) c += (v - mean) * (v - mean).transpose();
  c /= (n - 1);
  CHECK((c - s).norm() / s.norm() < 0.03);
}
