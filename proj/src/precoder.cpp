// SPDX-License-Identifier: Apache-2.0
#include "ilac/precoder.hpp"

#include <algorithm>
#include <cmath>

namespace ilac {

UeCsi perfect_csi(const Mat& h) {
  UeCsi c;
  c.h = h;
  return c;
}

Mat block_weighted_sum(const Mat& blocks, const Mat& pi, int n_ue_antennas) {
  const int nu = n_ue_antennas;
  const Eigen::Index nb = pi.rows();
  Mat out = Mat::Zero(nu, nu);
  for (Eigen::Index n = 0; n < nb; ++n)
    for (Eigen::Index m = 0; m < nb; ++m)
      out += pi(m, n) * blocks.block(m * nu, n * nu, nu, nu);
  return out;
}

Mat block_trace_product(const Mat& blocks, const Mat& z, int n_ue_antennas) {
  const int nu = n_ue_antennas;
  const Eigen::Index nb = blocks.rows() / nu;
  Mat out(nb, nb);
  for (Eigen::Index n = 0; n < nb; ++n)
    for (Eigen::Index m = 0; m < nb; ++m)
      out(m, n) = (z.cwiseProduct(blocks.block(n * nu, m * nu, nu, nu).transpose())).sum();
  return out;
}

namespace {

Mat gram(const Mat& v) { return v * v.adjoint(); }

double rate_from(const Mat& hv, const Mat& j) {
  Mat s = hv.adjoint() * hermitian_solve(j, hv);
  s = hermitian_part(s);
  s.diagonal().array() += 1.0;
  return std::max(0.0, log2det_hpd(s));
}

}  // namespace

std::vector<double> rate_perfect_csi(const std::vector<Mat>& h, const std::vector<Mat>& v,
                                     double sigma2) {
  const std::size_t n = h.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Mat j = Mat::Identity(h[i].rows(), h[i].rows()) * sigma2;
    for (std::size_t k = 0; k < n; ++k)
      if (k != i) {
        Mat hv = h[i] * v[k];
        j += hv * hv.adjoint();
      }
    out[i] = rate_from(h[i] * v[i], j);
  }
  return out;
}

Mat interference_covariance(int i, const std::vector<Mat>& v, const Mat& error_cov_i,
                            const Mat& second_moment_i, double sigma2, double es,
                            int n_ue_antennas) {
  const int nu = n_ue_antennas;
  Mat j = Mat::Identity(nu, nu) * sigma2;
  Mat pi_i = gram(v[i]);
  if (error_cov_i.size() > 0) j += es * block_weighted_sum(error_cov_i, pi_i, nu);
  Mat pi_other = Mat::Zero(pi_i.rows(), pi_i.cols());
  for (std::size_t k = 0; k < v.size(); ++k)
    if (static_cast<int>(k) != i) pi_other += gram(v[k]);
  j += es * block_weighted_sum(second_moment_i, pi_other, nu);
  return hermitian_part(j);
}

double rate_estimated_csi(const Mat& h_hat, const Mat& j_tilde, const Mat& v) {
  return rate_from(h_hat * v, j_tilde);
}

std::vector<double> rates(const std::vector<UeCsi>& csi, const std::vector<Mat>& v, double sigma2,
                          double es) {
  std::vector<double> out(csi.size());
  for (std::size_t i = 0; i < csi.size(); ++i) {
    const int nu = static_cast<int>(csi[i].h.rows());
    Mat j;
    if (csi[i].perfect() && csi[i].second_moment.size() == 0) {
      j = Mat::Identity(nu, nu) * sigma2;
      for (std::size_t k = 0; k < csi.size(); ++k)
        if (k != i) {
          Mat hv = csi[i].h * v[k];
          j += es * hv * hv.adjoint();
        }
    } else {
      Mat r2 = csi[i].second_moment;
      if (r2.size() == 0) {
        Vec hv = vec(csi[i].h);
        r2 = hv * hv.adjoint();
      }
      j = interference_covariance(static_cast<int>(i), v, csi[i].error_cov, r2, sigma2, es, nu);
    }
    out[i] = rate_estimated_csi(csi[i].h, j, v[i]);
  }
  return out;
}

std::vector<Mat> initial_precoders(const std::vector<UeCsi>& csi,
                                   const std::vector<double>& budgets) {
  std::vector<Mat> v;
  for (std::size_t i = 0; i < csi.size(); ++i) {
    Mat m = csi[i].h.adjoint();
    double nrm = m.norm();
    if (!(nrm > 0.0)) {
      m = Mat::Identity(csi[i].h.cols(), csi[i].h.rows());
      nrm = m.norm();
    }
    v.push_back(m * (std::sqrt(budgets[i]) / nrm));
  }
  return v;
}

namespace {

Mat receiver_covariance(int i, const std::vector<UeCsi>& csi, const std::vector<Mat>& v,
                        double sigma2) {
  const Mat& h = csi[i].h;
  const int nu = static_cast<int>(h.rows());
  Mat j = Mat::Identity(nu, nu) * sigma2;
  Mat pi_all = Mat::Zero(h.cols(), h.cols());
  for (const Mat& vk : v) {
    Mat hv = h * vk;
    j += hv * hv.adjoint();
    pi_all += gram(vk);
  }
  if (!csi[i].perfect()) j += block_weighted_sum(csi[i].error_cov, pi_all, nu);
  return hermitian_part(j);
}

}  // namespace

Mat mse_matrix(int i, const std::vector<UeCsi>& csi, const std::vector<Mat>& v, const Mat& g_i,
               double sigma2) {
  Mat j = receiver_covariance(i, csi, v, sigma2);
  Mat ghv = g_i.adjoint() * csi[i].h * v[i];
  Mat e = Mat::Identity(ghv.rows(), ghv.cols()) - ghv - ghv.adjoint() + g_i.adjoint() * j * g_i;
  return hermitian_part(e);
}

void receive_update(int i, const std::vector<UeCsi>& csi, const std::vector<Mat>& v, double sigma2,
                    Mat& g_i, Mat& e_i) {
  Mat j = receiver_covariance(i, csi, v, sigma2);
  Mat hv = csi[i].h * v[i];
  g_i = hermitian_solve(j, hv);
  Mat e = Mat::Identity(hv.cols(), hv.cols()) - hv.adjoint() * g_i;
  e_i = hermitian_part(e);
}

void precoder_update(const std::vector<UeCsi>& csi, const std::vector<Mat>& g,
                     const std::vector<Mat>& w, const std::vector<double>& budgets,
                     std::vector<Mat>& v, std::vector<double>& mu) {
  const std::size_t n = csi.size();
  const Eigen::Index nb = csi[0].h.cols();
  Mat k = Mat::Zero(nb, nb);
  for (std::size_t i = 0; i < n; ++i) {
    const int nu = static_cast<int>(csi[i].h.rows());
    Mat z = g[i] * w[i] * g[i].adjoint();
    k += csi[i].h.adjoint() * z * csi[i].h;
    if (!csi[i].perfect()) k += block_trace_product(csi[i].error_cov, z, nu);
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(k));
  RVec lam = es.eigenvalues().cwiseMax(0.0);
  const Mat& u = es.eigenvectors();
  mu.assign(n, 0.0);
  v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Mat b = csi[i].h.adjoint() * g[i] * w[i];
    Mat phi = u.adjoint() * b;
    RVec rows = phi.rowwise().squaredNorm();
    auto power = [&](double m) {
      double p = 0.0;
      for (Eigen::Index r = 0; r < rows.size(); ++r) {
        double d = lam(r) + m;
        if (rows(r) > 0.0) p += (d > 0.0) ? rows(r) / (d * d) : INFINITY;
      }
      return p;
    };
    const double budget = budgets[i];
    double m = 0.0;
    if (!(power(0.0) <= budget)) {
      double lo = 0.0;
      double hi = std::sqrt(rows.sum() / budget);
      while (power(hi) > budget) hi *= 2.0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (power(mid) > budget)
          lo = mid;
        else
          hi = mid;
      }
      m = hi;
    }
    RVec inv = (lam.array() + m).inverse();
    for (Eigen::Index r = 0; r < inv.size(); ++r)
      if (!std::isfinite(inv(r))) inv(r) = 0.0;
    v[i] = u * inv.asDiagonal() * phi;
    mu[i] = m;
  }
}

double weighted_mse_objective(const std::vector<UeCsi>& csi, const std::vector<Mat>& v,
                              const std::vector<Mat>& g, const std::vector<Mat>& w,
                              double sigma2) {
  double f = 0.0;
  for (std::size_t i = 0; i < csi.size(); ++i) {
    Mat e = mse_matrix(static_cast<int>(i), csi, v, g[i], sigma2);
    f += (w[i] * e).trace().real() - log2det_hpd(w[i]) * std::log(2.0);
  }
  return f;
}

PrecoderSet wmmse_optimize(const std::vector<UeCsi>& csi, const std::vector<double>& budgets,
                           double sigma2, const WmmseOptions& opts,
                           const std::vector<Mat>* init) {
  const std::size_t n = csi.size();
  if (budgets.size() != n) throw InvalidArgument("one power budget per UE required");
  for (double b : budgets)
    if (!(b > 0.0)) throw InvalidArgument("power budgets must be positive");
  PrecoderSet ps;
  ps.budgets = budgets;
  ps.v = init ? *init : initial_precoders(csi, budgets);
  ps.g.resize(n);
  ps.w.resize(n);
  double prev = 0.0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      Mat e;
      receive_update(static_cast<int>(i), csi, ps.v, sigma2, ps.g[i], e);
      ps.w[i] = hermitian_part(hermitian_inverse(e));
    }
    precoder_update(csi, ps.g, ps.w, budgets, ps.v, ps.mu);
    ps.objective_trace.push_back(weighted_mse_objective(csi, ps.v, ps.g, ps.w, sigma2));
    ps.ue_rates = rates(csi, ps.v, sigma2);
    double sum = 0.0;
    for (double r : ps.ue_rates) sum += r;
    ps.rate_trace.push_back(sum);
    ps.iterations = it;
    if (it > 1 && std::abs(sum - prev) <= opts.rel_tol * std::max(std::abs(sum), 1e-12)) {
      ps.converged = true;
      break;
    }
    prev = sum;
  }
  return ps;
}

}  // namespace ilac
