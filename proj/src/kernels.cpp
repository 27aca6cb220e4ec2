// SPDX-License-Identifier: Apache-2.0
#include "ilac/kernels.hpp"

#include <exception>
#include <mutex>

#ifdef ILAC_HAVE_OPENMP
#include <omp.h>
#endif

namespace ilac::kernels {

bool openmp_available() {
#ifdef ILAC_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

void for_each_index(int n, int workers, const std::function<void(int)>& fn) {
#ifdef ILAC_HAVE_OPENMP
  if (workers > 1) {
    std::exception_ptr err;
    std::mutex mu;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (int i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#else
  (void)workers;
#endif
  for (int i = 0; i < n; ++i) fn(i);
}

namespace {

struct Partial {
  Vec sum;
  Mat second;
};

Partial chunk_moments(const ChannelModel& model, const std::vector<RisProfile>& profiles,
                      int ue, const Vec3& p_hat, const Mat3& cov, int begin, int end,
                      std::uint64_t seed) {
  Partial p;
  for (int s = begin; s < end; ++s) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(s)}));
    Vec3 pos = sample_gaussian3(p_hat, cov, rng);
    ChannelStats st = model.composed_stats(profiles, ue, pos);
    if (s == begin) {
      p.sum = st.mean;
      p.second = st.mean * st.mean.adjoint() + st.covariance;
    } else {
      p.sum += st.mean;
      p.second.noalias() += st.mean * st.mean.adjoint();
      p.second += st.covariance;
    }
  }
  return p;
}

ChannelStats finish(std::vector<Partial>& parts, int n) {
  Vec sum = parts[0].sum;
  Mat second = parts[0].second;
  for (std::size_t c = 1; c < parts.size(); ++c) {
    sum += parts[c].sum;
    second += parts[c].second;
  }
  ChannelStats out;
  out.mean = sum / static_cast<double>(n);
  out.covariance = psd_repair(second / static_cast<double>(n) - out.mean * out.mean.adjoint());
  return out;
}

int n_chunks(int n) { return (n + kChunk - 1) / kChunk; }

}  // namespace

ChannelStats marginal_moments_serial(const ChannelModel& model,
                                     const std::vector<RisProfile>& profiles, int ue,
                                     const Vec3& p_hat, const Mat3& cov, int n_samples,
                                     std::uint64_t seed) {
  std::vector<Partial> parts(n_chunks(n_samples));
  for (int c = 0; c < static_cast<int>(parts.size()); ++c)
    parts[c] = chunk_moments(model, profiles, ue, p_hat, cov, c * kChunk,
                             std::min(n_samples, (c + 1) * kChunk), seed);
  return finish(parts, n_samples);
}

ChannelStats marginal_moments_parallel(const ChannelModel& model,
                                       const std::vector<RisProfile>& profiles, int ue,
                                       const Vec3& p_hat, const Mat3& cov, int n_samples,
                                       std::uint64_t seed, int workers) {
  std::vector<Partial> parts(n_chunks(n_samples));
  for_each_index(static_cast<int>(parts.size()), workers, [&](int c) {
    parts[c] = chunk_moments(model, profiles, ue, p_hat, cov, c * kChunk,
                             std::min(n_samples, (c + 1) * kChunk), seed);
  });
  return finish(parts, n_samples);
}

}  // namespace ilac::kernels
