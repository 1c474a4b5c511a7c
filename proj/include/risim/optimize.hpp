// SPDX-License-Identifier: Apache-2.0
//
// risim: distributed-RIS multi-user MISO downlink simulator.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "risim/detequiv.hpp"

namespace risim {

// Deterministic net-sum-rate objective with an incremental single-coordinate
// perturbation path. eval_perturbed computes the objective at
// phi + dphi * e_coord from cached base-point quantities using exact rank-one
// update algebra, so it agrees with a full evaluation to rounding error.
// This is what makes finite-difference gradients affordable at L*N ~ 10^3.
class ScsiObjective {
 public:
  ScsiObjective(const Scenario& sc, const ChannelStatics& cs, Protocol protocol);

  int dim() const { return LN_; }
  double loss_factor() const { return loss_; }

  double eval(const PhaseConfig& phi);  // full evaluation; also sets the base point
  void set_base(const PhaseConfig& phi);
  double base_objective() const { return base_obj_; }

  // Cache per-coordinate vectors shared by the +/- probes of one coordinate.
  void prepare_coord(int coord);
  double eval_perturbed(std::complex<double> dphi) const;  // prepared coordinate

 private:
  struct SigmaForm {  // a0 I + sum_l a(l) H1l H1l^H
    Eigen::VectorXd a0;     // [K]
    Eigen::MatrixXd a;      // [L x K]
  };

  double assemble(const Eigen::VectorXd& n, const Eigen::MatrixXcd& cross,
                  const Eigen::MatrixXd& s, const Eigen::MatrixXd& qde) const;

  // dimensions and constants
  int M_ = 0, K_ = 0, L_ = 0, N_ = 0, LN_ = 0;
  double rho_ = 0.0, loss_ = 0.0;
  Eigen::VectorXd p_;
  Protocol protocol_ = Protocol::perfect;
  bool dense_C_ = false;

  ChannelStatics cs_;
  SigmaForm Aform_, Bform_, Cform_;  // Cform_ unused when dense_C_
  Eigen::VectorXd trC_;              // [K]
  Eigen::MatrixXd trCB_;             // [K x K]
  Eigen::VectorXd unorm2_;           // [L], ||H1l col||^2 = M beta_1l
  std::vector<Eigen::MatrixXcd> Cdense_;          // de protocol
  std::vector<std::vector<Eigen::VectorXd>> diagP_;  // [K][L] of [N]: u^H C_f u

  bool cache_T_ = false;
  std::vector<std::vector<Eigen::MatrixXcd>> T_;  // [L][L0] of N x N: H1l^H H1l0

  // base point
  Eigen::VectorXcd base_phi_;
  Eigen::MatrixXcd hb_;                  // M x K
  std::vector<Eigen::MatrixXcd> v_;      // [L] of N x K: H1l^H hb
  std::vector<Eigen::MatrixXcd> y_;      // [K] of M x K: C_f hb (de only)
  Eigen::VectorXd n_;                    // [K]
  Eigen::MatrixXcd cross_;               // K x K
  Eigen::MatrixXd s_;                    // [L x K]
  Eigen::MatrixXd qde_;                  // [K x K] (de only): hb_k^H C_f hb_k
  double base_obj_ = 0.0;

  // prepared coordinate
  int coord_l_ = -1, coord_n_ = -1;
  Eigen::MatrixXcd tdot_;                // [L x K]: t_l^H v_l(:,k)
  Eigen::VectorXd tn_;                   // [L]: ||t_l||^2
  Eigen::MatrixXcd uy_;                  // [K x K]: u^H y_f(:,k) (de only)
  Eigen::VectorXd updiag_;               // [K]: u^H C_f u at the coordinate (de)
};

struct PgaOptions {
  double epsilon = 1e-6;       // threshold on squared objective change
  double mu0 = 1.0;            // initial step
  double backtrack_beta = 0.5;
  double backtrack_c = 1e-4;   // Armijo slope constant
  double fd_step = 1e-5;
  int max_iters = 500;
  bool random_init = false;    // default: all-ones phases
  Eigen::VectorXcd init_phi;   // nonempty: explicit start (projected first)
  std::uint64_t seed = 1;
};

struct PgaTrace {
  std::vector<double> objective;  // accepted objective per iteration (non-decreasing)
  std::vector<double> step;       // accepted step size
};

struct GaOptions {
  int population_size = 50;
  int generations = 100;
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;
  double mutation_sigma = 0.3;  // radians
  int elitism_count = 2;
  int tournament_size = 3;
  std::uint64_t seed = 1;
};

// (P1) objective: deterministic net sum-rate at the given phases.
double objective_scsi(const Scenario& sc, Protocol protocol, const PhaseConfig& phi);

// Complex finite-difference gradient: [p]_i = dR/dRe(phi_i) + j dR/dIm(phi_i),
// central differences at unprojected perturbations.
Eigen::VectorXcd numeric_gradient(ScsiObjective& obj, const PhaseConfig& phi,
                                  double fd_step = 1e-5);
Eigen::VectorXcd numeric_gradient(const Scenario& sc, Protocol protocol,
                                  const PhaseConfig& phi, double fd_step = 1e-5);

// Projected gradient ascent with backtracking line search on the S-CSI
// deterministic net sum-rate.
std::pair<PhaseConfig, PgaTrace> pga_optimize(const Scenario& sc,
                                              const ChannelStatics& cs,
                                              Protocol protocol,
                                              const PgaOptions& opts = {});

// Genetic algorithm over phase angles maximizing the instantaneous net
// sum-rate for one realization's full I-CSI estimates (dft protocol).
std::pair<PhaseConfig, std::vector<double>> ga_optimize_icsi(
    const Scenario& sc, const ChannelStatics& cs, const EstimateSet& est,
    const GaOptions& opts = {});

}  // namespace risim
