// SPDX-License-Identifier: Apache-2.0
//
// risim: distributed-RIS multi-user MISO downlink simulator.
#pragma once

#include <Eigen/Dense>

#include "risim/estimation.hpp"

namespace risim {

struct Precoder {
  Eigen::MatrixXcd G;  // M x K, g_k = zeta * h_hat_k
  double zeta = 0.0;
  double psi = 0.0;
};

// MRT columns scaled so that E[||x||^2] = P_max under the deterministic Psi.
Precoder mrt_precoder(const EstimateSet& est, const Scenario& sc, double psi);

// Psi = sum_k p_k tr(D_k + C_k): the closed-form E[tr(P Hhat Hhat^H)].
double psi_deterministic(const Scenario& sc, const ChannelStatics& cs,
                         const PhaseConfig& theta, Protocol protocol);

// Instantaneous SINR from the estimates at hand; Psi_inst = tr(P Hhat Hhat^H).
// Requires the error covariance C_tilde (dft or perfect protocol).
Eigen::VectorXd instantaneous_sinr(const EstimateSet& est, const Scenario& sc);

struct RateRecord {
  Eigen::VectorXd gamma;     // linear SINR per user
  Eigen::VectorXd rate;      // bits/s/Hz per user
  double sum_rate = 0.0;     // bits/s/Hz
  double overhead_symbols = 0.0;  // S * tau_S
  double loss_factor = 0.0;       // 1 - S tau_S / tau_C
};

// rate_k = (1 - S tau_S / tau_C) log2(1 + gamma_k); S may be real-valued.
RateRecord net_rate(const Eigen::VectorXd& gammas, double S, const Scenario& sc);

}  // namespace risim
