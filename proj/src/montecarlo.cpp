// SPDX-License-Identifier: Apache-2.0
//
// risim: distributed-RIS multi-user MISO downlink simulator.
#include "risim/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "risim/rng.hpp"

namespace risim {

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

// Runs fn(i) for i in [0, n) on a fixed partition into contiguous chunks.
// fn writes only to slot i, so results do not depend on the thread count.
template <typename Fn>
void parallel_samples(int n, int threads, const Fn& fn) {
  threads = std::min(resolve_threads(threads), std::max(n, 1));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

McSinrResult ergodic_sinr_mc(const Scenario& sc, const ChannelStatics& cs,
                             const PhaseConfig& theta, const McConfig& mc) {
  theta.require_unit_modulus();
  if (mc.n_samples < 2)
    throw std::invalid_argument("ergodic_sinr_mc: need at least 2 samples");
  const int K = sc.K();
  const int n = mc.n_samples;
  const double psi = psi_deterministic(sc, cs, theta, mc.protocol);

  Eigen::MatrixXcd a(n, K);  // a(i,k) = h_k^H hhat_k
  Eigen::MatrixXd b(n, K);   // b(i,k) = sum_{f!=k} p_f |h_k^H hhat_f|^2
  parallel_samples(n, mc.threads, [&](int i) {
    const std::uint64_t si = seed_mix(mc.seed, static_cast<std::uint64_t>(i));
    const ChannelRealization r = sample_channels(sc, cs, theta, si);
    const EstimateSet est = estimate(sc, cs, theta, r, mc.protocol, si);
    const Eigen::MatrixXcd g = r.h.adjoint() * est.h_hat;  // g(k,f) = h_k^H hhat_f
    for (int k = 0; k < K; ++k) {
      a(i, k) = g(k, k);
      double interf = 0.0;
      for (int f = 0; f < K; ++f)
        if (f != k) interf += sc.cfg.p(f) * std::norm(g(k, f));
      b(i, k) = interf;
    }
  });

  // Sequential reductions keep the result bitwise thread-count independent.
  McSinrResult out;
  out.psi = psi;
  out.n_samples = n;
  out.gamma.resize(K);
  out.stderr_jk.resize(K);
  const double noise = psi / sc.rho();
  for (int k = 0; k < K; ++k) {
    std::complex<double> Sa(0.0, 0.0);
    double Saa = 0.0, Sb = 0.0;
    for (int i = 0; i < n; ++i) {
      Sa += a(i, k);
      Saa += std::norm(a(i, k));
      Sb += b(i, k);
    }
    const std::complex<double> mean_a = Sa / double(n);
    const double var_a =
        (Saa - n * std::norm(mean_a)) / double(n - 1);  // unbiased
    const double mean_b = Sb / double(n);
    const double pk = sc.cfg.p(k);
    out.gamma(k) =
        pk * std::norm(mean_a) / (pk * var_a + mean_b + noise);

    if (n < 3) {
      out.stderr_jk(k) = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double jk_mean = 0.0, jk_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::complex<double> ma = (Sa - a(i, k)) / double(n - 1);
      const double va =
          (Saa - std::norm(a(i, k)) - (n - 1) * std::norm(ma)) / double(n - 2);
      const double mb = (Sb - b(i, k)) / double(n - 1);
      const double gi = pk * std::norm(ma) / (pk * va + mb + noise);
      jk_mean += gi;
      jk_sq += gi * gi;
    }
    jk_mean /= n;
    const double jk_var = (n - 1.0) / n * (jk_sq - n * jk_mean * jk_mean);
    out.stderr_jk(k) = std::sqrt(std::max(jk_var, 0.0));
  }
  return out;
}

McRateResult ergodic_net_sum_rate_mc(const Scenario& sc, const ChannelStatics& cs,
                                     const PhaseConfig& theta, const McConfig& mc) {
  McRateResult out;
  out.sinr = ergodic_sinr_mc(sc, cs, theta, mc);
  out.S_real = subphases_real(sc, mc.protocol);
  const RateRecord rec = net_rate(out.sinr.gamma, out.S_real, sc);
  out.rate = rec.rate;
  out.sum_rate = rec.sum_rate;
  return out;
}

CovarianceCheck validate_covariance(const Scenario& sc, const ChannelStatics& cs,
                                    const PhaseConfig& theta, const McConfig& mc) {
  theta.require_unit_modulus();
  if (mc.n_samples < 2)
    throw std::invalid_argument("validate_covariance: need at least 2 samples");
  const int M = sc.M(), K = sc.K();
  const int n = mc.n_samples;

  std::vector<Eigen::VectorXcd> S1(K, Eigen::VectorXcd::Zero(M));
  std::vector<Eigen::MatrixXcd> S2(K, Eigen::MatrixXcd::Zero(M, M));
  std::vector<Eigen::MatrixXcd> Sx(K, Eigen::MatrixXcd::Zero(M, M));
  for (int i = 0; i < n; ++i) {
    const std::uint64_t si = seed_mix(mc.seed, static_cast<std::uint64_t>(i));
    const ChannelRealization r = sample_channels(sc, cs, theta, si);
    const EstimateSet est = estimate(sc, cs, theta, r, mc.protocol, si);
    for (int k = 0; k < K; ++k) {
      const auto hh = est.h_hat.col(k);
      S1[k] += hh;
      S2[k] += hh * hh.adjoint();
      Sx[k] += (r.h.col(k) - hh) * hh.adjoint();
    }
  }

  const EstimateCovariances ec = estimate_covariance(sc, cs, mc.protocol);
  CovarianceCheck out;
  out.cov_rel_err.resize(K);
  out.mean_rel_err.resize(K);
  out.orth_rel_err.resize(K);
  for (int k = 0; k < K; ++k) {
    const Eigen::VectorXcd mean = S1[k] / double(n);
    const Eigen::MatrixXcd cov =
        (S2[k] - double(n) * mean * mean.adjoint()) / double(n - 1);
    const Eigen::VectorXcd hbar = los_aggregate(cs, theta, k);
    const double cnorm = ec.C[k].norm();
    out.cov_rel_err(k) = (cov - ec.C[k]).norm() / cnorm;
    out.mean_rel_err(k) = (mean - hbar).norm() / hbar.norm();
    out.orth_rel_err(k) = (Sx[k] / double(n)).norm() / cnorm;
  }
  return out;
}

}  // namespace risim
