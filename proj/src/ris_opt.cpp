// SPDX-License-Identifier: Apache-2.0
#include "ilac/ris_opt.hpp"

#include <cmath>

#include "ilac/kernels.hpp"
#include "ilac/precoder.hpp"

namespace ilac {

std::string to_string(RisScheme s) {
  switch (s) {
    case RisScheme::random: return "random";
    case RisScheme::prior: return "prior";
    case RisScheme::phase1: return "phase1";
    case RisScheme::oracle: return "oracle";
    case RisScheme::punctual_phase1: return "punctual_phase1";
    case RisScheme::punctual_prior: return "punctual_prior";
  }
  return "unknown";
}

RisScheme parse_scheme(const std::string& s) {
  for (RisScheme r : {RisScheme::random, RisScheme::prior, RisScheme::phase1, RisScheme::oracle,
                      RisScheme::punctual_phase1, RisScheme::punctual_prior})
    if (to_string(r) == s) return r;
  throw InvalidArgument("unknown RIS scheme: " + s);
}

bool scheme_uses_uncertainty(RisScheme s) {
  return s == RisScheme::prior || s == RisScheme::phase1;
}

UncertaintyEnsemble build_ensemble(const Scenario& sc, const std::vector<Vec3>& p_hat,
                                   const std::vector<Mat3>& cov, int n_pos, int n_nlos,
                                   Rng& rng) {
  if (n_pos < 1 || n_nlos < 1) throw InvalidArgument("ensemble sizes must be positive");
  ChannelModel model(sc);
  const std::uint64_t base = rng.engine()();
  UncertaintyEnsemble ens;
  for (int a = 0; a < n_pos; ++a) {
    Rng prng(derive_seed(base, {static_cast<std::uint64_t>(a)}));
    std::vector<Vec3> pos;
    for (int i = 0; i < sc.n_ue(); ++i) pos.push_back(sample_gaussian3(p_hat[i], cov[i], prng));
    for (int b = 0; b < n_nlos; ++b) {
      Rng nrng(derive_seed(base, {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b) + 1}));
      EnsembleSample s;
      s.positions = pos;
      s.nlos.resize(sc.n_ue());
      for (int i = 0; i < sc.n_ue(); ++i) {
        const int nu = sc.ue[i].layout.size();
        for (int k = 0; k < sc.n_ris(); ++k) {
          double var = model.ue_link(k, i, pos[i]).nlos_variance;
          s.nlos[i].push_back(sample_nlos(nu, sc.ris[k].layout.size(), var, nrng));
        }
        s.direct.push_back(sample_nlos(nu, sc.n_bs(), sc.ue[i].direct_nlos_variance, nrng));
      }
      ens.samples.push_back(std::move(s));
    }
  }
  return ens;
}

std::vector<RisProfile> random_profiles(const Scenario& sc, Rng& rng) {
  std::vector<RisProfile> out;
  for (int k = 0; k < sc.n_ris(); ++k) {
    RisProfile b(sc.ris[k].layout.size());
    for (Eigen::Index p = 0; p < b.size(); ++p) b(p) = rng.unit_phasor();
    out.push_back(b);
  }
  return out;
}

namespace {

// g_k (H_los + H_nlos) Diag(a_in): maps the profile to the RIS contribution.
Mat reflection_operator(const ChannelModel& model, const EnsembleSample& s, int ue, int k) {
  const BsRisLink& bl = model.bs_link(k);
  RisUeLink ul = model.ue_link(k, ue, s.positions[ue]);
  Mat c = (ul.los_gain * ul.a_ue) * ul.a_ris.cwiseProduct(bl.a_ris).transpose();
  if (s.nlos[ue][k].size() > 0) c += s.nlos[ue][k] * bl.a_ris.asDiagonal();
  return bl.gain * c;
}

struct SampleState {
  std::vector<std::vector<Mat>> c;  // [ue][ris]
  std::vector<std::vector<Vec>> u;  // [ue][ris] = c b
  std::vector<Mat> d;
  std::vector<Mat> h, v, g, w, z, gamma;
  Mat t;
};

Mat assemble(const SampleState& st, int i, const Mat& a) {
  Mat h = st.d[i];
  for (std::size_t k = 0; k < st.u[i].size(); ++k) h += st.u[i][k] * a.row(k);
  return h;
}

std::vector<UeCsi> csi_of(const SampleState& st) {
  std::vector<UeCsi> csi;
  for (const Mat& h : st.h) csi.push_back(perfect_csi(h));
  return csi;
}

// Receivers, weights, precoders for one sample, then the sweep coefficients.
double update_sample(SampleState& st, const Mat& a, const std::vector<double>& budgets,
                     double sigma2) {
  const int n = static_cast<int>(st.h.size());
  std::vector<UeCsi> csi = csi_of(st);
  for (int i = 0; i < n; ++i) {
    Mat e;
    receive_update(i, csi, st.v, sigma2, st.g[i], e);
    st.w[i] = hermitian_part(hermitian_inverse(e));
  }
  std::vector<double> mu;
  precoder_update(csi, st.g, st.w, budgets, st.v, mu);
  Mat s = Mat::Zero(a.cols(), a.cols());
  for (const Mat& v : st.v) s += v * v.adjoint();
  st.t = a * s * a.adjoint();
  for (int i = 0; i < n; ++i) {
    st.z[i] = st.g[i] * st.w[i] * st.g[i].adjoint();
    st.gamma[i] = (st.z[i] * st.h[i] * s - st.g[i] * st.w[i] * st.v[i].adjoint()) * a.adjoint();
  }
  return weighted_mse_objective(csi, st.v, st.g, st.w, sigma2);
}

double sample_objective(const SampleState& st, double sigma2) {
  return weighted_mse_objective(csi_of(st), st.v, st.g, st.w, sigma2);
}

}  // namespace

Mat ensemble_channel(const ChannelModel& model, const EnsembleSample& s,
                     const std::vector<RisProfile>& profiles, int ue) {
  Mat h = s.direct[ue];
  for (int k = 0; k < model.scenario().n_ris(); ++k)
    h += (reflection_operator(model, s, ue, k) * profiles[k]) * model.bs_link(k).a_bs.transpose();
  return h;
}

RisOptResult optimize_profiles(const ChannelModel& model, const UncertaintyEnsemble& ensemble,
                               const std::vector<RisProfile>& init,
                               const std::vector<double>& budgets, const RisOptOptions& opts) {
  const Scenario& sc = model.scenario();
  const int nk = sc.n_ris();
  const int nue = sc.n_ue();
  const int omega = ensemble.size();
  const double sigma2 = sc.rf.noise_variance;
  if (omega < 1) throw InvalidArgument("ensemble is empty");
  if (static_cast<int>(init.size()) != nk) throw InvalidArgument("one profile per RIS required");

  RisOptResult res;
  res.profiles = init;
  for (auto& b : res.profiles) b = b.array() / b.array().abs();

  Mat a(nk, sc.n_bs());
  for (int k = 0; k < nk; ++k) a.row(k) = model.bs_link(k).a_bs.transpose();

  std::vector<SampleState> states(omega);
  kernels::for_each_index(omega, opts.workers, [&](int o) {
    SampleState& st = states[o];
    const EnsembleSample& s = ensemble.samples[o];
    st.c.resize(nue);
    st.u.resize(nue);
    st.d = s.direct;
    st.h.resize(nue);
    st.g.resize(nue);
    st.w.resize(nue);
    st.z.resize(nue);
    st.gamma.resize(nue);
    for (int i = 0; i < nue; ++i) {
      for (int k = 0; k < nk; ++k) {
        st.c[i].push_back(reflection_operator(model, s, i, k));
        st.u[i].push_back(st.c[i][k] * res.profiles[k]);
      }
      st.h[i] = assemble(st, i, a);
    }
    if (opts.warm_precoders)
      st.v = (*opts.warm_precoders)[o];
    else
      st.v = initial_precoders(csi_of(st), budgets);
  });

  std::vector<double> per_sample(omega);
  auto average = [&]() {
    double f = 0.0;
    for (double x : per_sample) f += x;
    return f / omega;
  };

  const int nu_max = [&] {
    int m = 0;
    for (int i = 0; i < nue; ++i) m = std::max(m, sc.ue[i].layout.size());
    return m;
  }();
  std::vector<Vec> zc(static_cast<std::size_t>(omega) * nue, Vec(nu_max));

  double prev = 0.0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    kernels::for_each_index(omega, opts.workers, [&](int o) {
      per_sample[o] = update_sample(states[o], a, budgets, sigma2);
    });
    res.step_trace.push_back(average());

    for (int k = 0; k < nk; ++k) {
      RisProfile& b = res.profiles[k];
      for (Eigen::Index p = 0; p < b.size(); ++p) {
        cd g = 0.0;
        double q = 0.0;
        for (int o = 0; o < omega; ++o) {
          SampleState& st = states[o];
          const double tkk = st.t(k, k).real();
          for (int i = 0; i < nue; ++i) {
            auto cp = st.c[i][k].col(p);
            Vec& zcp = zc[static_cast<std::size_t>(o) * nue + i];
            zcp.noalias() = st.z[i] * cp;
            q += tkk * cp.dot(zcp).real();
            g += cp.dot(st.gamma[i].col(k));
          }
        }
        const cd b0 = b(p);
        const cd x = q * b0 - g;
        const double ax = std::abs(x);
        if (!(ax > 0.0)) continue;
        const cd bn = x / ax;
        const cd delta = bn - b0;
        if (delta == cd(0.0)) continue;
        b(p) = bn;
        for (int o = 0; o < omega; ++o) {
          SampleState& st = states[o];
          for (int i = 0; i < nue; ++i) {
            const Vec& zcp = zc[static_cast<std::size_t>(o) * nue + i];
            for (int kk = 0; kk < nk; ++kk) st.gamma[i].col(kk) += (delta * st.t(k, kk)) * zcp;
            st.u[i][k] += delta * st.c[i][k].col(p);
          }
        }
      }
    }

    kernels::for_each_index(omega, opts.workers, [&](int o) {
      SampleState& st = states[o];
      for (int i = 0; i < nue; ++i) {
        for (int k = 0; k < nk; ++k) st.u[i][k] = st.c[i][k] * res.profiles[k];
        st.h[i] = assemble(st, i, a);
      }
      per_sample[o] = sample_objective(st, sigma2);
    });
    double f = average();
    res.step_trace.push_back(f);
    res.objective_trace.push_back(f);
    res.iterations = it;
    if (it > 1 && std::abs(prev - f) <= opts.rel_tol * std::max(std::abs(f), 1e-300)) {
      res.converged = true;
      break;
    }
    prev = f;
  }

  double rate = 0.0;
  for (int o = 0; o < omega; ++o) {
    auto r = rate_perfect_csi(states[o].h, states[o].v, sigma2);
    for (double x : r) rate += x;
    res.precoders.push_back(states[o].v);
  }
  res.average_sum_rate = rate / omega;
  return res;
}

}  // namespace ilac
