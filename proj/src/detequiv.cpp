// SPDX-License-Identifier: Apache-2.0
//
// risim: distributed-RIS multi-user MISO downlink simulator.
#include "risim/detequiv.hpp"

#include <cmath>
#include <stdexcept>

namespace risim {

namespace {

double beta_nlos_d(const Scenario& sc, int k) {
  return sc.links.beta_dk(k) / (sc.links.kappa_dk(k) + 1.0);
}
double beta_nlos_2(const Scenario& sc, int l, int k) {
  return sc.links.beta_2lk(l, k) / (sc.links.kappa_2lk(l, k) + 1.0);
}

}  // namespace

DetStats build_det_stats(const Scenario& sc, const ChannelStatics& cs,
                         Protocol protocol) {
  const int M = sc.M(), K = sc.K(), L = sc.L();
  const double tau = sc.cfg.rho_p * sc.cfg.tau_S;

  DetStats st;
  st.protocol = protocol;
  st.M = M;
  st.K = K;
  st.rho = sc.rho();
  st.S_real = subphases_real(sc, protocol);
  st.p = sc.cfg.p;
  st.tau_S = sc.cfg.tau_S;
  st.tau_C = sc.cfg.tau_C;
  st.cs = cs;

  const CovarianceSet cov = channel_covariances(sc, cs);
  st.C.reserve(K);
  st.B.reserve(K);
  switch (protocol) {
    case Protocol::dft: {
      const double S = st.S_real;  // real-valued count inside the shrinkage
      for (int k = 0; k < K; ++k) {
        const double bnd = beta_nlos_d(sc, k);
        Eigen::MatrixXcd C = (bnd * bnd / (bnd + 1.0 / (S * tau))) *
                             Eigen::MatrixXcd::Identity(M, M);
        for (int l = 0; l < L; ++l) {
          const double bn2 = beta_nlos_2(sc, l, k);
          C += (bn2 * bn2 / (bn2 + 1.0 / (S * tau * M * sc.links.beta_1l(l)))) *
               cs.H1sq[l];
        }
        st.C.push_back(std::move(C));
      }
      st.B = cov.A;
      break;
    }
    case Protocol::de: {
      for (int k = 0; k < K; ++k) {
        const Eigen::MatrixXcd& R = cov.R[k];
        st.C.push_back(
            R * (R + Eigen::MatrixXcd::Identity(M, M) / tau).ldlt().solve(R));
      }
      st.B = cov.R;
      break;
    }
    case Protocol::perfect: {
      st.C = cov.A;
      st.B = cov.A;
      break;
    }
  }

  st.trC.resize(K);
  for (int k = 0; k < K; ++k) st.trC(k) = st.C[k].trace().real();
  st.trCB.resize(K, K);
  for (int f = 0; f < K; ++f)
    for (int k = 0; k < K; ++k)
      st.trCB(f, k) = st.C[f].cwiseProduct(st.B[k].transpose()).sum().real();
  return st;
}

Eigen::VectorXd sinr_det(const DetStats& st, const PhaseConfig& theta) {
  const int M = st.M, K = st.K;

  Eigen::MatrixXcd hb(M, K);
  for (int k = 0; k < K; ++k) hb.col(k) = los_aggregate(st.cs, theta, k);
  const Eigen::MatrixXcd cross = hb.adjoint() * hb;  // cross(f,k) = hb_f^H hb_k

  // qB(f,k) = hb_f^H B_k hb_f ; qC(f,k) = hb_k^H C_f hb_k
  Eigen::MatrixXd qB(K, K), qC(K, K);
  for (int k = 0; k < K; ++k) {
    const Eigen::MatrixXcd Bh = st.B[k] * hb;
    const Eigen::MatrixXcd Ch = st.C[k] * hb;
    for (int f = 0; f < K; ++f) {
      qB(f, k) = hb.col(f).dot(Bh.col(f)).real();
      qC(k, f) = hb.col(f).dot(Ch.col(f)).real();  // row f of C_k -> qC(k, f)
    }
  }

  double psi = 0.0;
  for (int k = 0; k < K; ++k)
    psi += st.p(k) * (cross(k, k).real() + st.trC(k));

  Eigen::VectorXd gamma(K);
  for (int k = 0; k < K; ++k) {
    const double num =
        st.p(k) * std::pow((cross(k, k).real() + st.trC(k)) / M, 2);
    double interf = 0.0;
    for (int f = 0; f < K; ++f) {
      if (f == k) continue;
      interf += st.p(f) *
                (std::norm(cross(f, k)) + qB(f, k) + qC(f, k) + st.trCB(f, k));
    }
    const double den = interf / (M * double(M)) + psi / (M * double(M) * st.rho);
    gamma(k) = num / den;
  }
  return gamma;
}

double net_sum_rate_det(const DetStats& st, const PhaseConfig& theta) {
  const double loss = st.loss_factor();
  if (loss < 0.0)
    throw std::runtime_error("net_sum_rate_det: training exceeds the coherence block");
  const Eigen::VectorXd gamma = sinr_det(st, theta);
  return loss * ((1.0 + gamma.array()).log() / std::log(2.0)).sum();
}

Eigen::VectorXd sinr_det_dft(const Scenario& sc, const PhaseConfig& theta) {
  return sinr_det(build_det_stats(sc, build_channel_statics(sc), Protocol::dft), theta);
}

Eigen::VectorXd sinr_det_de(const Scenario& sc, const PhaseConfig& theta) {
  return sinr_det(build_det_stats(sc, build_channel_statics(sc), Protocol::de), theta);
}

Eigen::VectorXd sinr_det_perfect(const Scenario& sc, const PhaseConfig& theta) {
  return sinr_det(build_det_stats(sc, build_channel_statics(sc), Protocol::perfect),
                  theta);
}

double net_sum_rate_det(const Scenario& sc, const PhaseConfig& theta,
                        Protocol protocol) {
  return net_sum_rate_det(build_det_stats(sc, build_channel_statics(sc), protocol),
                          theta);
}

Eigen::VectorXd sinr_det_noris(const Scenario& sc) {
  const int M = sc.M(), K = sc.K();
  const double tau = sc.cfg.rho_p * sc.cfg.tau_S;
  const Eigen::VectorXd& p = sc.cfg.p;

  Eigen::MatrixXcd hd(M, K);
  for (int k = 0; k < K; ++k) hd.col(k) = los_user_vectors(sc, k).hbar_dk;
  const Eigen::MatrixXcd cross = hd.adjoint() * hd;

  Eigen::VectorXd g(K);  // scalar MMSE shrinkage, single sub-phase
  for (int k = 0; k < K; ++k) {
    const double bn = beta_nlos_d(sc, k);
    g(k) = bn * bn / (bn + 1.0 / tau);
  }

  double psi = 0.0;
  for (int k = 0; k < K; ++k) psi += p(k) * (cross(k, k).real() + g(k) * M);

  Eigen::VectorXd gamma(K);
  for (int k = 0; k < K; ++k) {
    const double num = p(k) * std::pow((cross(k, k).real() + g(k) * M) / M, 2);
    double interf = 0.0;
    const double bnk = beta_nlos_d(sc, k);  // true-channel NLoS variance
    for (int f = 0; f < K; ++f) {
      if (f == k) continue;
      // tr((D_f + g_f I)(D_k + bn_k I)) for rank-one D: the estimate-side
      // covariance is the shrunk g_f, the true-channel side keeps bn_k
      interf += p(f) * (std::norm(cross(f, k)) + bnk * cross(f, f).real() +
                        g(f) * cross(k, k).real() + g(f) * bnk * M);
    }
    const double den =
        interf / (M * double(M)) + psi / (M * double(M) * sc.rho());
    gamma(k) = num / den;
  }
  return gamma;
}

double net_sum_rate_det_noris(const Scenario& sc, Protocol protocol) {
  Eigen::VectorXd gamma;
  double S = 1.0;
  if (protocol == Protocol::perfect) {
    // rho_p -> infinity reduction of Eq.-type shrinkage: g_k -> beta^n_dk
    Scenario ideal = sc;
    ideal.cfg.rho_p = 1e18;
    gamma = sinr_det_noris(ideal);
    S = sc.cfg.perfect_csi_subphases;
  } else {
    gamma = sinr_det_noris(sc);
    S = 1.0;
  }
  const double loss = 1.0 - S * sc.cfg.tau_S / sc.cfg.tau_C;
  if (loss < 0.0)
    throw std::runtime_error("net_sum_rate_det_noris: training exceeds the coherence block");
  return loss * ((1.0 + gamma.array()).log() / std::log(2.0)).sum();
}

}  // namespace risim
