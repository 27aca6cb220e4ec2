// SPDX-License-Identifier: Apache-2.0
#pragma once

// Hot Monte Carlo loops. Each kernel has a serial reference and an OpenMP
// variant; both split work into fixed-size chunks with per-index RNG
// substreams and reduce chunk partials in index order, so results are
// bitwise identical for every worker count.

#include <cstdint>
#include <functional>
#include <vector>

#include "ilac/channel.hpp"

namespace ilac::kernels {

inline constexpr int kChunk = 32;

bool openmp_available();

// Runs fn(0..n-1). Callers must write results to per-index slots.
void for_each_index(int n, int workers, const std::function<void(int)>& fn);

ChannelStats marginal_moments_serial(const ChannelModel& model,
                                     const std::vector<RisProfile>& profiles, int ue,
                                     const Vec3& p_hat, const Mat3& cov, int n_samples,
                                     std::uint64_t seed);

ChannelStats marginal_moments_parallel(const ChannelModel& model,
                                       const std::vector<RisProfile>& profiles, int ue,
                                       const Vec3& p_hat, const Mat3& cov, int n_samples,
                                       std::uint64_t seed, int workers);

}  // namespace ilac::kernels
