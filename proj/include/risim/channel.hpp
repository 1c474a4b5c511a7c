// SPDX-License-Identifier: Apache-2.0
//
// risim: distributed-RIS multi-user MISO downlink simulator.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "risim/scenario.hpp"

namespace risim {

// The L*N unit-modulus RIS reflection coefficients, phi[l*N + n] = e^{j theta_ln}.
struct PhaseConfig {
  Eigen::VectorXcd phi;

  static PhaseConfig all_ones(int LN);
  static PhaseConfig random(int LN, std::uint64_t seed);
  static PhaseConfig from_angles(const Eigen::VectorXd& theta);
  // exp(j arg(x)): closest unit-modulus point, entrywise.
  static PhaseConfig project(const Eigen::VectorXcd& x);

  Eigen::VectorXcd panel(int l, int N) const { return phi.segment(static_cast<Eigen::Index>(l) * N, N); }
  bool unit_modulus(double tol = 1e-9) const;
  void require_unit_modulus() const;
};

// Deterministic per-scenario channel structure: LoS BS-RIS matrices and the
// LoS user vectors. Built once, shared read-only.
struct ChannelStatics {
  std::vector<Eigen::MatrixXcd> H1;     // [L] of M x N, spherical-wave LoS
  std::vector<Eigen::MatrixXcd> H1sq;   // [L] of M x M, H1 H1^H
  Eigen::MatrixXcd hbar_d;              // M x K
  std::vector<Eigen::MatrixXcd> hbar_2; // [L] of N x K
};

struct UserLosVectors {
  Eigen::VectorXcd hbar_dk;               // [M]
  std::vector<Eigen::VectorXcd> hbar_2lk; // [L] of [N]
};

// One draw of all random channel components. h = h_d + sum_l H1l Theta_l h_2l.
struct ChannelRealization {
  Eigen::MatrixXcd h_d;               // M x K
  std::vector<Eigen::MatrixXcd> h_2;  // [L] of N x K
  Eigen::MatrixXcd h;                 // M x K aggregate for the given phases
  std::uint64_t seed = 0;
};

struct CovarianceSet {
  std::vector<Eigen::MatrixXcd> A;  // [K] of M x M
  std::vector<Eigen::MatrixXcd> R;  // [K] of M x M (same closed form as A)
};

// [H_1l]_{m,n} = sqrt(beta_1l) exp(j 2 pi / lambda * dist(antenna m, element n)).
Eigen::MatrixXcd los_bs_ris_matrix(const Scenario& sc, int l);

UserLosVectors los_user_vectors(const Scenario& sc, int k);

ChannelStatics build_channel_statics(const Scenario& sc);

CovarianceSet channel_covariances(const Scenario& sc, const ChannelStatics& cs);

// hbar_k(Theta) = hbar_dk + sum_l H1l Theta_l hbar_2lk
Eigen::VectorXcd los_aggregate(const ChannelStatics& cs, const PhaseConfig& theta,
                               int k);
// D_k as the rank-one outer product hbar_k(Theta) hbar_k(Theta)^H.
Eigen::MatrixXcd los_outer(const ChannelStatics& cs, const PhaseConfig& theta, int k);
// D_k assembled from its printed four-term expansion; equals los_outer.
Eigen::MatrixXcd los_outer_expanded(const ChannelStatics& cs, const PhaseConfig& theta,
                                    int k);

// Draws z_dk ~ CN(0, beta_dk I), z_2lk ~ CN(0, beta_2lk I) on seed-derived
// per-(user, link) streams; reproducible for a given seed.
ChannelRealization sample_channels(const Scenario& sc, const ChannelStatics& cs,
                                   const PhaseConfig& theta, std::uint64_t seed);

// CSV dump of one realization (column-major blocks, header names dimensions).
void dump_realization_csv(const ChannelRealization& r, const std::string& path);

}  // namespace risim
