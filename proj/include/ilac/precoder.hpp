// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "ilac/linalg.hpp"

namespace ilac {

// What the BS knows about the channel of one UE. Vectorization is
// column-major, so block (m, n) of a covariance is rows m*N_U.., cols n*N_U..
struct UeCsi {
  Mat h;              // estimate (or truth), N_U x N_B
  Mat error_cov;      // error covariance; empty means perfect CSI
  Mat second_moment;  // E{h h^H} used for interference; empty means vec(h) vec(h)^H

  bool perfect() const { return error_cov.size() == 0; }
};

UeCsi perfect_csi(const Mat& h);

// Sum over blocks: sum_{m,n} pi(m,n) * blocks^{(m,n)}  (N_U x N_U).
Mat block_weighted_sum(const Mat& blocks, const Mat& pi, int n_ue_antennas);

// Matrix with entries (m,n) = Tr(z * blocks^{(n,m)})  (N_B x N_B).
Mat block_trace_product(const Mat& blocks, const Mat& z, int n_ue_antennas);

std::vector<double> rate_perfect_csi(const std::vector<Mat>& h, const std::vector<Mat>& v,
                                     double sigma2);

Mat interference_covariance(int i, const std::vector<Mat>& v, const Mat& error_cov_i,
                            const Mat& second_moment_i, double sigma2, double es,
                            int n_ue_antennas);

double rate_estimated_csi(const Mat& h_hat, const Mat& j_tilde, const Mat& v);

// Per-UE rates for a CSI set (perfect entries reduce to the perfect-CSI rate).
std::vector<double> rates(const std::vector<UeCsi>& csi, const std::vector<Mat>& v, double sigma2,
                          double es = 1.0);

struct WmmseOptions {
  int max_iterations = 100;
  double rel_tol = 1e-5;
};

struct PrecoderSet {
  std::vector<Mat> v;
  std::vector<Mat> g;
  std::vector<Mat> w;
  std::vector<double> budgets;
  std::vector<double> mu;
  std::vector<double> objective_trace;  // weighted MSE after each iteration
  std::vector<double> rate_trace;       // sum rate after each iteration
  std::vector<double> ue_rates;
  bool converged = false;
  int iterations = 0;
};

// Maximum-ratio start using the full per-UE budget.
std::vector<Mat> initial_precoders(const std::vector<UeCsi>& csi,
                                   const std::vector<double>& budgets);

// MSE matrix of UE i given receive filter g_i (error terms included).
Mat mse_matrix(int i, const std::vector<UeCsi>& csi, const std::vector<Mat>& v, const Mat& g_i,
               double sigma2);

// Optimal receive filter and resulting MSE matrix.
void receive_update(int i, const std::vector<UeCsi>& csi, const std::vector<Mat>& v, double sigma2,
                    Mat& g_i, Mat& e_i);

// Power-constrained precoder update given receivers and weights.
void precoder_update(const std::vector<UeCsi>& csi, const std::vector<Mat>& g,
                     const std::vector<Mat>& w, const std::vector<double>& budgets,
                     std::vector<Mat>& v, std::vector<double>& mu);

double weighted_mse_objective(const std::vector<UeCsi>& csi, const std::vector<Mat>& v,
                              const std::vector<Mat>& g, const std::vector<Mat>& w,
                              double sigma2);

PrecoderSet wmmse_optimize(const std::vector<UeCsi>& csi, const std::vector<double>& budgets,
                           double sigma2, const WmmseOptions& opts = {},
                           const std::vector<Mat>* init = nullptr);

}  // namespace ilac
