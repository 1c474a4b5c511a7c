// SPDX-License-Identifier: Apache-2.0
//
// risim: distributed-RIS multi-user MISO downlink simulator.
#pragma once

#include <Eigen/Dense>

#include "risim/estimation.hpp"

namespace risim {

// Phase-independent matrices entering the deterministic SINR equivalents:
// C_k (estimate covariance, with the real-valued sub-phase count in the dft
// shrinkage) and B_k (true-channel side of the cross terms: A_k for
// dft/perfect, R_k for de). Build once per (scenario, protocol), evaluate
// for many phase configurations.
struct DetStats {
  Protocol protocol = Protocol::perfect;
  int M = 0, K = 0;
  double rho = 0.0;
  double S_real = 0.0;
  Eigen::VectorXd p;
  ChannelStatics cs;
  std::vector<Eigen::MatrixXcd> C, B;
  Eigen::VectorXd trC;    // [K]
  Eigen::MatrixXd trCB;   // [K x K], tr(C_f B_k)
  double tau_S = 0.0, tau_C = 0.0;
  double loss_factor() const { return 1.0 - S_real * tau_S / tau_C; }
};

DetStats build_det_stats(const Scenario& sc, const ChannelStatics& cs,
                         Protocol protocol);

Eigen::VectorXd sinr_det(const DetStats& st, const PhaseConfig& theta);
double net_sum_rate_det(const DetStats& st, const PhaseConfig& theta);

// Convenience one-shot forms.
Eigen::VectorXd sinr_det_dft(const Scenario& sc, const PhaseConfig& theta);
Eigen::VectorXd sinr_det_de(const Scenario& sc, const PhaseConfig& theta);
Eigen::VectorXd sinr_det_perfect(const Scenario& sc, const PhaseConfig& theta);
double net_sum_rate_det(const Scenario& sc, const PhaseConfig& theta,
                        Protocol protocol);

// No-RIS deterministic SINR, independent of the phase configuration.
Eigen::VectorXd sinr_det_noris(const Scenario& sc);
double net_sum_rate_det_noris(const Scenario& sc, Protocol protocol);

}  // namespace risim
