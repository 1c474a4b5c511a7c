// SPDX-License-Identifier: Apache-2.0
//
// risim: distributed-RIS multi-user MISO downlink simulator.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "risim/channel.hpp"
#include "risim/scenario.hpp"

namespace risim {

enum class Protocol { dft, de, perfect };

const char* protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& name);

// Sub-phase accounting. The sampled estimator runs ceil(NL/M) + 1 sub-phases;
// rate formulas charge the exact real-valued NL/M + 1 (the figures plot the
// formula value). Both are exposed.
int subphases_int(const Scenario& sc, Protocol p);
double subphases_real(const Scenario& sc, Protocol p);

// Per-user MMSE estimates of the individual NLoS links, available only under
// the DFT protocol. Lets the aggregate estimate be re-assembled for any
// phase configuration (full I-CSI).
struct DftLinkEstimates {
  Eigen::VectorXcd d;                // [M] estimate of h^n_dk
  std::vector<Eigen::VectorXcd> ris; // [L] of [N], estimates of h^n_2lk
};

struct EstimateSet {
  Protocol protocol = Protocol::perfect;
  Eigen::MatrixXcd h_hat;                 // M x K
  std::vector<Eigen::MatrixXcd> C;        // [K] estimate covariance
  std::vector<Eigen::MatrixXcd> C_tilde;  // [K] error covariance (dft/perfect)
  int S = 0;                              // sub-phases consumed
  double S_real = 0.0;                    // formula value charged to the rate
  std::vector<DftLinkEstimates> links;    // dft only
};

// S x (NL+1) training matrix, [V]_{s,n} = e^{-j 2 pi (n-1)(s-1)/S}.
Eigen::MatrixXcd dft_training_matrix(int S, int N, int L);

// Multi-sub-phase MMSE-DFT protocol: per-link observations with DFT-combined
// training noise, scalar MMSE shrinkage, aggregate re-assembly.
EstimateSet estimate_mmse_dft(const Scenario& sc, const ChannelStatics& cs,
                              const PhaseConfig& theta,
                              const ChannelRealization& r, std::uint64_t seed);

// Single-sub-phase direct estimation of the aggregate channel (exact MMSE).
EstimateSet estimate_de(const Scenario& sc, const ChannelStatics& cs,
                        const PhaseConfig& theta, const ChannelRealization& r,
                        std::uint64_t seed);

// Perfect CSI: h_hat = h, C = A, C_tilde = 0.
EstimateSet estimate_perfect(const Scenario& sc, const ChannelStatics& cs,
                             const PhaseConfig& theta, const ChannelRealization& r);

EstimateSet estimate(const Scenario& sc, const ChannelStatics& cs,
                     const PhaseConfig& theta, const ChannelRealization& r,
                     Protocol protocol, std::uint64_t seed);

// Closed-form second-order statistics without sampling. For dft, C_tilde =
// A - C as well. The dft shrinkage uses the integer sub-phase count actually
// consumed by the sampled estimator.
struct EstimateCovariances {
  std::vector<Eigen::MatrixXcd> C, C_tilde;
};
EstimateCovariances estimate_covariance(const Scenario& sc, const ChannelStatics& cs,
                                        Protocol protocol);

// Aggregate estimate for user k re-assembled from link estimates at an
// arbitrary phase configuration (I-CSI use).
Eigen::VectorXcd assemble_dft_estimate(const ChannelStatics& cs,
                                       const PhaseConfig& theta,
                                       const DftLinkEstimates& links, int k);

}  // namespace risim
