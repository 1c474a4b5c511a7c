// SPDX-License-Identifier: Apache-2.0
//
// risim: distributed-RIS multi-user MISO downlink simulator.
#include "risim/estimation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "risim/rng.hpp"

namespace risim {

namespace {
constexpr std::complex<double> kJ{0.0, 1.0};
enum StreamTag : std::uint64_t { kDftNoise = 10, kDeNoise = 11 };

double beta_nlos_d(const Scenario& sc, int k) {
  return sc.links.beta_dk(k) / (sc.links.kappa_dk(k) + 1.0);
}
double beta_nlos_2(const Scenario& sc, int l, int k) {
  return sc.links.beta_2lk(l, k) / (sc.links.kappa_2lk(l, k) + 1.0);
}
}  // namespace

const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::dft: return "dft";
    case Protocol::de: return "de";
    case Protocol::perfect: return "perfect";
  }
  return "?";
}

Protocol protocol_from_name(const std::string& name) {
  if (name == "dft") return Protocol::dft;
  if (name == "de") return Protocol::de;
  if (name == "perfect") return Protocol::perfect;
  throw std::invalid_argument("unknown protocol '" + name + "'");
}

int subphases_int(const Scenario& sc, Protocol p) {
  switch (p) {
    case Protocol::dft:
      return static_cast<int>(std::ceil(static_cast<double>(sc.N()) * sc.L() / sc.M())) + 1;
    case Protocol::de: return 1;
    case Protocol::perfect: return 0;
  }
  return 0;
}

double subphases_real(const Scenario& sc, Protocol p) {
  switch (p) {
    case Protocol::dft:
      return static_cast<double>(sc.N()) * sc.L() / sc.M() + 1.0;
    case Protocol::de: return 1.0;
    case Protocol::perfect: return sc.cfg.perfect_csi_subphases;
  }
  return 0.0;
}

Eigen::MatrixXcd dft_training_matrix(int S, int N, int L) {
  if (S < 1) throw std::invalid_argument("dft_training_matrix: S must be >= 1");
  Eigen::MatrixXcd V(S, N * L + 1);
  for (int s = 0; s < S; ++s)
    for (int n = 0; n < N * L + 1; ++n)
      V(s, n) = std::exp(-kJ * (2.0 * std::numbers::pi * n * s / S));
  return V;
}

EstimateSet estimate_mmse_dft(const Scenario& sc, const ChannelStatics& cs,
                              const PhaseConfig& theta,
                              const ChannelRealization& r, std::uint64_t seed) {
  theta.require_unit_modulus();
  if (sc.cfg.rho_p <= 0.0) throw std::invalid_argument("estimate_mmse_dft: rho_p <= 0");
  const int M = sc.M(), K = sc.K(), L = sc.L(), N = sc.N();
  const int S = subphases_int(sc, Protocol::dft);
  const double tau = sc.cfg.rho_p * sc.cfg.tau_S;
  const double noise_var = 1.0 / tau;  // per entry of n_k^tr

  const Eigen::MatrixXcd V = dft_training_matrix(S, N, L);

  EstimateSet est;
  est.protocol = Protocol::dft;
  est.S = S;
  est.S_real = subphases_real(sc, Protocol::dft);
  est.h_hat.resize(M, K);
  est.links.resize(K);

  for (int k = 0; k < K; ++k) {
    // received training noise, one M-block per sub-phase
    Eigen::MatrixXcd noise(M, S);
    for (int s = 0; s < S; ++s) {
      Rng rng(seed_mix(seed, kDftNoise, k, s));
      noise.col(s) = rng.cgauss_vector(M, noise_var);
    }

    // direct link: r0 = h_dk + (1/S)(v_1 (x) I)^H n  (first DFT column is all ones)
    const Eigen::VectorXcd r0 = r.h_d.col(k) + noise.rowwise().sum() / double(S);
    const double bnd = beta_nlos_d(sc, k);
    const double wd = bnd / (bnd + 1.0 / (S * tau));
    DftLinkEstimates& lk = est.links[k];
    lk.d = wd * (r0 - cs.hbar_d.col(k));

    lk.ris.resize(L);
    Eigen::VectorXcd h_hat = cs.hbar_d.col(k) + lk.d;
    for (int l = 0; l < L; ++l) {
      // r_l = h_2lk + (1/(S M beta_1l)) Hbar_1l^H (V_l (x) I)^H n
      const Eigen::MatrixXcd W = cs.H1[l].adjoint() * noise;             // N x S
      const Eigen::MatrixXcd Vl = V.middleCols(1 + static_cast<Eigen::Index>(l) * N, N);
      const Eigen::VectorXcd combined =
          Vl.conjugate().transpose().cwiseProduct(W).rowwise().sum();
      const Eigen::VectorXcd rl =
          r.h_2[l].col(k) + combined / (S * M * sc.links.beta_1l(l));
      const double bn2 = beta_nlos_2(sc, l, k);
      const double w2 = bn2 / (bn2 + 1.0 / (S * tau * M * sc.links.beta_1l(l)));
      lk.ris[l] = w2 * (rl - cs.hbar_2[l].col(k));
      h_hat += cs.H1[l] * theta.panel(l, N).cwiseProduct(cs.hbar_2[l].col(k) + lk.ris[l]);
    }
    est.h_hat.col(k) = h_hat;
  }

  EstimateCovariances cov = estimate_covariance(sc, cs, Protocol::dft);
  est.C = std::move(cov.C);
  est.C_tilde = std::move(cov.C_tilde);
  return est;
}

EstimateSet estimate_de(const Scenario& sc, const ChannelStatics& cs,
                        const PhaseConfig& theta, const ChannelRealization& r,
                        std::uint64_t seed) {
  theta.require_unit_modulus();
  if (sc.cfg.rho_p <= 0.0) throw std::invalid_argument("estimate_de: rho_p <= 0");
  const int M = sc.M(), K = sc.K();
  const double tau = sc.cfg.rho_p * sc.cfg.tau_S;

  const CovarianceSet cov = channel_covariances(sc, cs);
  EstimateSet est;
  est.protocol = Protocol::de;
  est.S = 1;
  est.S_real = 1.0;
  est.h_hat.resize(M, K);
  est.C.reserve(K);
  for (int k = 0; k < K; ++k) {
    Rng rng(seed_mix(seed, kDeNoise, k));
    const Eigen::VectorXcd y = r.h.col(k) + rng.cgauss_vector(M, 1.0 / tau);
    const Eigen::VectorXcd hbar = los_aggregate(cs, theta, k);
    const Eigen::MatrixXcd& R = cov.R[k];
    const Eigen::MatrixXcd Rq =
        (R + Eigen::MatrixXcd::Identity(M, M) / tau).ldlt().solve(R);  // Q_k R_k
    est.h_hat.col(k) = hbar + Rq.adjoint() * (y - hbar);               // R_k Q_k (y - hbar)
    est.C.push_back(R * Rq);                                           // R_k Q_k R_k
  }
  return est;
}

EstimateSet estimate_perfect(const Scenario& sc, const ChannelStatics& cs,
                             const PhaseConfig& theta, const ChannelRealization& r) {
  theta.require_unit_modulus();
  EstimateSet est;
  est.protocol = Protocol::perfect;
  est.S = 0;
  est.S_real = sc.cfg.perfect_csi_subphases;
  est.h_hat = r.h;
  const CovarianceSet cov = channel_covariances(sc, cs);
  est.C = cov.A;
  est.C_tilde.assign(sc.K(), Eigen::MatrixXcd::Zero(sc.M(), sc.M()));
  return est;
}

EstimateSet estimate(const Scenario& sc, const ChannelStatics& cs,
                     const PhaseConfig& theta, const ChannelRealization& r,
                     Protocol protocol, std::uint64_t seed) {
  switch (protocol) {
    case Protocol::dft: return estimate_mmse_dft(sc, cs, theta, r, seed);
    case Protocol::de: return estimate_de(sc, cs, theta, r, seed);
    case Protocol::perfect: return estimate_perfect(sc, cs, theta, r);
  }
  throw std::invalid_argument("estimate: bad protocol");
}

EstimateCovariances estimate_covariance(const Scenario& sc, const ChannelStatics& cs,
                                        Protocol protocol) {
  const int M = sc.M(), K = sc.K(), L = sc.L();
  const double tau = sc.cfg.rho_p * sc.cfg.tau_S;
  const CovarianceSet cov = channel_covariances(sc, cs);
  EstimateCovariances out;
  out.C.reserve(K);

  switch (protocol) {
    case Protocol::dft: {
      const int S = subphases_int(sc, Protocol::dft);
      for (int k = 0; k < K; ++k) {
        const double bnd = beta_nlos_d(sc, k);
        Eigen::MatrixXcd C = (bnd * bnd / (bnd + 1.0 / (S * tau))) *
                             Eigen::MatrixXcd::Identity(M, M);
        for (int l = 0; l < L; ++l) {
          const double bn2 = beta_nlos_2(sc, l, k);
          C += (bn2 * bn2 / (bn2 + 1.0 / (S * tau * M * sc.links.beta_1l(l)))) *
               cs.H1sq[l];
        }
        out.C_tilde.push_back(cov.A[k] - C);
        out.C.push_back(std::move(C));
      }
      break;
    }
    case Protocol::de: {
      for (int k = 0; k < K; ++k) {
        const Eigen::MatrixXcd& R = cov.R[k];
        out.C.push_back(
            R * (R + Eigen::MatrixXcd::Identity(M, M) / tau).ldlt().solve(R));
      }
      break;
    }
    case Protocol::perfect: {
      out.C = cov.A;
      out.C_tilde.assign(K, Eigen::MatrixXcd::Zero(M, M));
      break;
    }
  }
  return out;
}

Eigen::VectorXcd assemble_dft_estimate(const ChannelStatics& cs,
                                       const PhaseConfig& theta,
                                       const DftLinkEstimates& links, int k) {
  const int L = static_cast<int>(cs.H1.size());
  const int N = L > 0 ? static_cast<int>(cs.H1[0].cols()) : 0;
  Eigen::VectorXcd h = cs.hbar_d.col(k) + links.d;
  for (int l = 0; l < L; ++l)
    h += cs.H1[l] *
         theta.panel(l, N).cwiseProduct(cs.hbar_2[l].col(k) + links.ris[l]);
  return h;
}

}  // namespace risim
