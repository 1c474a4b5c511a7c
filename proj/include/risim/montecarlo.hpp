// SPDX-License-Identifier: Apache-2.0
//
// risim: distributed-RIS multi-user MISO downlink simulator.
#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "risim/precoding.hpp"

namespace risim {

struct McConfig {
  int n_samples = 1000;
  std::uint64_t seed = 1;
  Protocol protocol = Protocol::perfect;
  int threads = 1;  // <= 0 -> hardware concurrency
};

// Plug-in ergodic SINR estimate built from per-sample moments
//   a_i = h_k^H hhat_k,   b_i = sum_{f != k} p_f |h_k^H hhat_f|^2,
// with the deterministic Psi in the noise term. Standard errors are
// delete-one jackknife estimates of the plug-in ratio. Results are
// independent of the thread count: sample i always uses seed_mix(seed, i).
struct McSinrResult {
  Eigen::VectorXd gamma;      // [K] plug-in ergodic SINR
  Eigen::VectorXd stderr_jk;  // [K] jackknife standard error of gamma
  double psi = 0.0;
  int n_samples = 0;
};

McSinrResult ergodic_sinr_mc(const Scenario& sc, const ChannelStatics& cs,
                             const PhaseConfig& theta, const McConfig& mc);

struct McRateResult {
  McSinrResult sinr;
  Eigen::VectorXd rate;  // [K] net rate at the plug-in SINR
  double sum_rate = 0.0;
  double S_real = 0.0;
};

McRateResult ergodic_net_sum_rate_mc(const Scenario& sc, const ChannelStatics& cs,
                                     const PhaseConfig& theta, const McConfig& mc);

// Sampled second-order statistics of the estimator against the closed forms:
// relative Frobenius errors of cov(hhat) vs C_k and of the estimate mean,
// plus the MMSE orthogonality residual |E[(h - hhat) hhat^H]| (relative).
struct CovarianceCheck {
  Eigen::VectorXd cov_rel_err;    // [K]
  Eigen::VectorXd mean_rel_err;   // [K]
  Eigen::VectorXd orth_rel_err;   // [K]
};

CovarianceCheck validate_covariance(const Scenario& sc, const ChannelStatics& cs,
                                    const PhaseConfig& theta, const McConfig& mc);

}  // namespace risim
