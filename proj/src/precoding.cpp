// SPDX-License-Identifier: Apache-2.0
//
// risim: distributed-RIS multi-user MISO downlink simulator.
#include "risim/precoding.hpp"

#include <cmath>
#include <stdexcept>

namespace risim {

Precoder mrt_precoder(const EstimateSet& est, const Scenario& sc, double psi) {
  if (psi <= 0.0) throw std::invalid_argument("mrt_precoder: psi must be positive");
  Precoder pc;
  pc.psi = psi;
  pc.zeta = std::sqrt(sc.cfg.P_max / psi);
  pc.G = pc.zeta * est.h_hat;
  return pc;
}

double psi_deterministic(const Scenario& sc, const ChannelStatics& cs,
                         const PhaseConfig& theta, Protocol protocol) {
  const EstimateCovariances cov = estimate_covariance(sc, cs, protocol);
  double psi = 0.0;
  for (int k = 0; k < sc.K(); ++k) {
    const double trD = los_aggregate(cs, theta, k).squaredNorm();
    psi += sc.cfg.p(k) * (trD + cov.C[k].trace().real());
  }
  return psi;
}

Eigen::VectorXd instantaneous_sinr(const EstimateSet& est, const Scenario& sc) {
  if (est.C_tilde.empty())
    throw std::invalid_argument(
        "instantaneous_sinr: protocol provides no error covariance C_tilde");
  const int K = sc.K();
  const Eigen::VectorXd& p = sc.cfg.p;
  const double rho = sc.rho();

  const Eigen::MatrixXcd gram = est.h_hat.adjoint() * est.h_hat;  // K x K
  double psi_inst = 0.0;
  for (int f = 0; f < K; ++f) psi_inst += p(f) * gram(f, f).real();

  Eigen::VectorXd gamma(K);
  for (int k = 0; k < K; ++k) {
    double interference = 0.0;
    for (int f = 0; f < K; ++f)
      if (f != k) interference += p(f) * std::norm(gram(k, f));
    double error_term = 0.0;
    for (int f = 0; f < K; ++f)
      error_term +=
          p(f) *
          (est.h_hat.col(f).adjoint() * est.C_tilde[k] * est.h_hat.col(f))(0).real();
    const double num = p(k) * std::norm(gram(k, k));
    gamma(k) = num / (interference + error_term + psi_inst / rho);
  }
  return gamma;
}

RateRecord net_rate(const Eigen::VectorXd& gammas, double S, const Scenario& sc) {
  RateRecord rec;
  rec.gamma = gammas;
  rec.overhead_symbols = S * sc.cfg.tau_S;
  if (rec.overhead_symbols > sc.cfg.tau_C)
    throw std::runtime_error("net_rate: training exceeds the coherence block");
  rec.loss_factor = 1.0 - rec.overhead_symbols / sc.cfg.tau_C;
  rec.rate = rec.loss_factor * (1.0 + gammas.array()).log() / std::log(2.0);
  rec.sum_rate = rec.rate.sum();
  return rec;
}

}  // namespace risim
