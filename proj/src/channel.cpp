// SPDX-License-Identifier: Apache-2.0
//
// risim: distributed-RIS multi-user MISO downlink simulator.
#include "risim/channel.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "risim/rng.hpp"

namespace risim {

using std::complex;
namespace {
constexpr complex<double> kJ{0.0, 1.0};
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// RNG stream tags for per-link draw ordering.
enum StreamTag : std::uint64_t { kDirect = 1, kRisUser = 2, kPhase = 3 };
}  // namespace

PhaseConfig PhaseConfig::all_ones(int LN) {
  PhaseConfig pc;
  pc.phi = Eigen::VectorXcd::Ones(LN);
  return pc;
}

PhaseConfig PhaseConfig::random(int LN, std::uint64_t seed) {
  Rng rng(seed_mix(seed, kPhase));
  Eigen::VectorXd theta(LN);
  for (int i = 0; i < LN; ++i) theta(i) = kTwoPi * rng.uniform();
  return from_angles(theta);
}

PhaseConfig PhaseConfig::from_angles(const Eigen::VectorXd& theta) {
  PhaseConfig pc;
  pc.phi = (kJ * theta.cast<complex<double>>()).array().exp();
  return pc;
}

PhaseConfig PhaseConfig::project(const Eigen::VectorXcd& x) {
  PhaseConfig pc;
  pc.phi.resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    pc.phi(i) = std::polar(1.0, std::arg(x(i)));
  return pc;
}

bool PhaseConfig::unit_modulus(double tol) const {
  return ((phi.array().abs() - 1.0).abs() <= tol).all();
}

void PhaseConfig::require_unit_modulus() const {
  if (!unit_modulus())
    throw std::invalid_argument("PhaseConfig: |phi_ln| = 1 violated");
}

Eigen::MatrixXcd los_bs_ris_matrix(const Scenario& sc, int l) {
  const int M = sc.M(), N1 = sc.cfg.N1, N2 = sc.cfg.N2;
  const double amp = std::sqrt(sc.links.beta_1l(l));
  Eigen::MatrixXcd H(M, N1 * N2);
  for (int m = 0; m < M; ++m) {
    const Eigen::Vector3d pm = sc.bs_antenna_position(m);
    for (int n1 = 0; n1 < N1; ++n1) {
      for (int n2 = 0; n2 < N2; ++n2) {
        const int n = n1 * N2 + n2;
        const double dist = (sc.ris_element_position(l, n1, n2) - pm).norm();
        H(m, n) = amp * std::exp(kJ * (kTwoPi / sc.cfg.wavelength * dist));
      }
    }
  }
  return H;
}

namespace {

// Geometric phase sequence [1, e^{j 2 pi d cos(phi)}, ..., e^{j 2 pi d (n-1) cos(phi)}].
Eigen::VectorXcd steering(int n, double spacing, double angle) {
  Eigen::VectorXcd v(n);
  const double step = kTwoPi * spacing * std::cos(angle);
  for (int i = 0; i < n; ++i) v(i) = std::exp(kJ * (step * i));
  return v;
}

}  // namespace

UserLosVectors los_user_vectors(const Scenario& sc, int k) {
  const auto& ls = sc.links;
  UserLosVectors out;
  const double amp_d = std::sqrt(ls.beta_dk(k) * ls.kappa_dk(k) / (ls.kappa_dk(k) + 1.0));
  out.hbar_dk = amp_d * steering(sc.M(), sc.cfg.d_bs, ls.phi_dk(k));
  out.hbar_2lk.reserve(sc.L());
  for (int l = 0; l < sc.L(); ++l) {
    const double kap = ls.kappa_2lk(l, k);
    const double amp = std::sqrt(ls.beta_2lk(l, k) * kap / (kap + 1.0));
    const Eigen::VectorXcd bz = steering(sc.cfg.N1, sc.cfg.d_ris_1, ls.phi_2lk(l, k));
    const Eigen::VectorXcd bx = steering(sc.cfg.N2, sc.cfg.d_ris_2, ls.phi_2lk(l, k));
    Eigen::VectorXcd h(sc.N());
    for (int n1 = 0; n1 < sc.cfg.N1; ++n1)
      h.segment(static_cast<Eigen::Index>(n1) * sc.cfg.N2, sc.cfg.N2) = bz(n1) * bx;
    out.hbar_2lk.push_back(amp * h);
  }
  return out;
}

ChannelStatics build_channel_statics(const Scenario& sc) {
  ChannelStatics cs;
  cs.H1.reserve(sc.L());
  cs.H1sq.reserve(sc.L());
  for (int l = 0; l < sc.L(); ++l) {
    cs.H1.push_back(los_bs_ris_matrix(sc, l));
    cs.H1sq.push_back(cs.H1.back() * cs.H1.back().adjoint());
  }
  cs.hbar_d.resize(sc.M(), sc.K());
  cs.hbar_2.assign(sc.L(), Eigen::MatrixXcd(sc.N(), sc.K()));
  for (int k = 0; k < sc.K(); ++k) {
    const UserLosVectors v = los_user_vectors(sc, k);
    cs.hbar_d.col(k) = v.hbar_dk;
    for (int l = 0; l < sc.L(); ++l) cs.hbar_2[l].col(k) = v.hbar_2lk[l];
  }
  return cs;
}

CovarianceSet channel_covariances(const Scenario& sc, const ChannelStatics& cs) {
  const int M = sc.M();
  CovarianceSet out;
  out.A.reserve(sc.K());
  for (int k = 0; k < sc.K(); ++k) {
    Eigen::MatrixXcd A = (sc.links.beta_dk(k) / (sc.links.kappa_dk(k) + 1.0)) *
                         Eigen::MatrixXcd::Identity(M, M);
    for (int l = 0; l < sc.L(); ++l)
      A += (sc.links.beta_2lk(l, k) / (sc.links.kappa_2lk(l, k) + 1.0)) * cs.H1sq[l];
    out.A.push_back(std::move(A));
  }
  out.R = out.A;  // Lemma-3 R_k has the identical closed form
  return out;
}

// Accepts arbitrary (not necessarily unit-modulus) phases: the deterministic
// SINR formulas are evaluated off the feasible set by finite-difference probes.
Eigen::VectorXcd los_aggregate(const ChannelStatics& cs, const PhaseConfig& theta,
                               int k) {
  Eigen::VectorXcd h = cs.hbar_d.col(k);
  const int L = static_cast<int>(cs.H1.size());
  const int N = L > 0 ? static_cast<int>(cs.H1[0].cols()) : 0;
  for (int l = 0; l < L; ++l)
    h += cs.H1[l] * theta.panel(l, N).cwiseProduct(cs.hbar_2[l].col(k));
  return h;
}

Eigen::MatrixXcd los_outer(const ChannelStatics& cs, const PhaseConfig& theta, int k) {
  const Eigen::VectorXcd h = los_aggregate(cs, theta, k);
  return h * h.adjoint();
}

Eigen::MatrixXcd los_outer_expanded(const ChannelStatics& cs, const PhaseConfig& theta,
                                    int k) {
  theta.require_unit_modulus();
  const int L = static_cast<int>(cs.H1.size());
  const int N = L > 0 ? static_cast<int>(cs.H1[0].cols()) : 0;
  const Eigen::VectorXcd hd = cs.hbar_d.col(k);
  Eigen::MatrixXcd D = hd * hd.adjoint();
  std::vector<Eigen::VectorXcd> cascade(L);
  for (int l = 0; l < L; ++l)
    cascade[l] = cs.H1[l] * theta.panel(l, N).cwiseProduct(cs.hbar_2[l].col(k));
  for (int l = 0; l < L; ++l) {
    D += hd * cascade[l].adjoint();
    D += cascade[l] * hd.adjoint();
    for (int lp = 0; lp < L; ++lp) D += cascade[l] * cascade[lp].adjoint();
  }
  return D;
}

ChannelRealization sample_channels(const Scenario& sc, const ChannelStatics& cs,
                                   const PhaseConfig& theta, std::uint64_t seed) {
  theta.require_unit_modulus();
  const int M = sc.M(), K = sc.K(), L = sc.L(), N = sc.N();
  ChannelRealization r;
  r.seed = seed;
  r.h_d.resize(M, K);
  r.h_2.assign(L, Eigen::MatrixXcd(N, K));
  r.h.resize(M, K);
  for (int k = 0; k < K; ++k) {
    Rng rng_d(seed_mix(seed, kDirect, k));
    const double kap_d = sc.links.kappa_dk(k);
    r.h_d.col(k) = cs.hbar_d.col(k) +
                   rng_d.cgauss_vector(M, sc.links.beta_dk(k)) / std::sqrt(kap_d + 1.0);
    Eigen::VectorXcd agg = r.h_d.col(k);
    for (int l = 0; l < L; ++l) {
      Rng rng_l(seed_mix(seed, kRisUser, l, k));
      const double kap = sc.links.kappa_2lk(l, k);
      r.h_2[l].col(k) = cs.hbar_2[l].col(k) +
                        rng_l.cgauss_vector(N, sc.links.beta_2lk(l, k)) /
                            std::sqrt(kap + 1.0);
      agg += cs.H1[l] * theta.panel(l, N).cwiseProduct(r.h_2[l].col(k));
    }
    r.h.col(k) = agg;
  }
  return r;
}

void dump_realization_csv(const ChannelRealization& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_realization_csv: cannot open " + path);
  const Eigen::Index M = r.h.rows(), K = r.h.cols();
  const Eigen::Index L = static_cast<Eigen::Index>(r.h_2.size());
  const Eigen::Index N = L > 0 ? r.h_2[0].rows() : 0;
  out << "# M=" << M << " K=" << K << " L=" << L << " N=" << N
      << " seed=" << r.seed << " layout=column-major\n";
  out << "block,col,row,re,im\n";
  out.precision(17);
  auto dump = [&out](const std::string& name, const Eigen::MatrixXcd& A) {
    for (Eigen::Index c = 0; c < A.cols(); ++c)
      for (Eigen::Index rr = 0; rr < A.rows(); ++rr)
        out << name << ',' << c << ',' << rr << ',' << A(rr, c).real() << ','
            << A(rr, c).imag() << '\n';
  };
  dump("h_d", r.h_d);
  for (Eigen::Index l = 0; l < L; ++l) dump("h_2." + std::to_string(l), r.h_2[l]);
  dump("h", r.h);
}

}  // namespace risim
