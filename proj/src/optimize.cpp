// SPDX-License-Identifier: Apache-2.0
//
// risim: distributed-RIS multi-user MISO downlink simulator.
#include "risim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "risim/precoding.hpp"
#include "risim/rng.hpp"

namespace risim {

namespace {

constexpr std::uint64_t kGaStreamTag = 20;
constexpr std::uint64_t kPgaInitTag = 21;

double beta_nlos_d(const Scenario& sc, int k) {
  return sc.links.beta_dk(k) / (sc.links.kappa_dk(k) + 1.0);
}
double beta_nlos_2(const Scenario& sc, int l, int k) {
  return sc.links.beta_2lk(l, k) / (sc.links.kappa_2lk(l, k) + 1.0);
}

}  // namespace

ScsiObjective::ScsiObjective(const Scenario& sc, const ChannelStatics& cs,
                             Protocol protocol)
    : M_(sc.M()),
      K_(sc.K()),
      L_(sc.L()),
      N_(sc.N()),
      LN_(sc.L() * sc.N()),
      rho_(sc.rho()),
      p_(sc.cfg.p),
      protocol_(protocol),
      cs_(cs) {
  const double S_real = subphases_real(sc, protocol);
  loss_ = 1.0 - S_real * sc.cfg.tau_S / sc.cfg.tau_C;
  if (loss_ < 0.0)
    throw std::invalid_argument(
        "ScsiObjective: training overhead exceeds the coherence budget");
  const double tau = sc.cfg.rho_p * sc.cfg.tau_S;

  Aform_.a0.resize(K_);
  Aform_.a.resize(L_, K_);
  for (int k = 0; k < K_; ++k) {
    Aform_.a0(k) = beta_nlos_d(sc, k);
    for (int l = 0; l < L_; ++l) Aform_.a(l, k) = beta_nlos_2(sc, l, k);
  }
  Bform_ = Aform_;  // B = A (dft/perfect) and B = R = A (de)

  dense_C_ = (protocol == Protocol::de);
  if (protocol == Protocol::dft) {
    Cform_.a0.resize(K_);
    Cform_.a.resize(L_, K_);
    for (int k = 0; k < K_; ++k) {
      const double bnd = Aform_.a0(k);
      Cform_.a0(k) = bnd * bnd / (bnd + 1.0 / (S_real * tau));
      for (int l = 0; l < L_; ++l) {
        const double bn2 = Aform_.a(l, k);
        Cform_.a(l, k) =
            bn2 * bn2 / (bn2 + 1.0 / (S_real * tau * M_ * sc.links.beta_1l(l)));
      }
    }
  } else if (protocol == Protocol::perfect) {
    Cform_ = Aform_;
  }

  Eigen::VectorXd trH(L_);
  for (int l = 0; l < L_; ++l) trH(l) = cs_.H1sq[l].trace().real();
  unorm2_.resize(std::max(L_, 1));
  for (int l = 0; l < L_; ++l) unorm2_(l) = M_ * sc.links.beta_1l(l);

  trC_.resize(K_);
  trCB_.resize(K_, K_);
  if (!dense_C_) {
    Eigen::MatrixXd G(L_, L_);  // G(l,l') = tr(H1sq_l H1sq_l')
    for (int l = 0; l < L_; ++l)
      for (int lp = 0; lp <= l; ++lp) {
        G(l, lp) =
            cs_.H1sq[l].cwiseProduct(cs_.H1sq[lp].transpose()).sum().real();
        G(lp, l) = G(l, lp);
      }
    for (int k = 0; k < K_; ++k)
      trC_(k) = Cform_.a0(k) * M_ + Cform_.a.col(k).dot(trH);
    for (int f = 0; f < K_; ++f)
      for (int k = 0; k < K_; ++k)
        trCB_(f, k) = Cform_.a0(f) * Bform_.a0(k) * M_ +
                      Cform_.a0(f) * Bform_.a.col(k).dot(trH) +
                      Bform_.a0(k) * Cform_.a.col(f).dot(trH) +
                      Cform_.a.col(f).dot(G * Bform_.a.col(k));
  } else {
    Cdense_.resize(K_);
    diagP_.assign(K_, std::vector<Eigen::VectorXd>(L_));
    Eigen::MatrixXd tB(K_, L_);  // tr(C_f H1sq_l)
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(M_, M_);
    for (int f = 0; f < K_; ++f) {
      Eigen::MatrixXcd R = Aform_.a0(f) * I;
      for (int l = 0; l < L_; ++l) R += Aform_.a(l, f) * cs_.H1sq[l];
      Cdense_[f] = R * (R + I / tau).ldlt().solve(R);
      trC_(f) = Cdense_[f].trace().real();
      for (int l = 0; l < L_; ++l) {
        tB(f, l) =
            Cdense_[f].cwiseProduct(cs_.H1sq[l].transpose()).sum().real();
        const Eigen::MatrixXcd W = Cdense_[f] * cs_.H1[l];
        diagP_[f][l] = cs_.H1[l]
                           .conjugate()
                           .cwiseProduct(W)
                           .colwise()
                           .sum()
                           .real()
                           .transpose();
      }
    }
    for (int f = 0; f < K_; ++f)
      for (int k = 0; k < K_; ++k)
        trCB_(f, k) =
            Bform_.a0(k) * trC_(f) + Bform_.a.col(k).dot(tB.row(f).transpose());
  }

  // The per-coordinate probes need H1l^H H1l0 columns; cache all L^2 blocks
  // when that fits comfortably in memory, otherwise recompute per coordinate.
  cache_T_ = static_cast<double>(L_) * L_ * N_ * N_ <= 1e7;
  if (cache_T_) {
    T_.assign(L_, std::vector<Eigen::MatrixXcd>(L_));
    for (int l = 0; l < L_; ++l)
      for (int l0 = 0; l0 < L_; ++l0)
        T_[l][l0] = cs_.H1[l].adjoint() * cs_.H1[l0];
  }
}

void ScsiObjective::set_base(const PhaseConfig& phi) {
  if (phi.phi.size() != LN_)
    throw std::invalid_argument("ScsiObjective: phase vector size mismatch");
  base_phi_ = phi.phi;
  hb_.resize(M_, K_);
  for (int k = 0; k < K_; ++k) hb_.col(k) = los_aggregate(cs_, phi, k);
  v_.resize(L_);
  s_.resize(L_, K_);
  for (int l = 0; l < L_; ++l) {
    v_[l] = cs_.H1[l].adjoint() * hb_;
    s_.row(l) = v_[l].colwise().squaredNorm();
  }
  n_ = hb_.colwise().squaredNorm().transpose();
  cross_ = hb_.adjoint() * hb_;
  if (dense_C_) {
    y_.resize(K_);
    qde_.resize(K_, K_);
    for (int f = 0; f < K_; ++f) {
      y_[f] = Cdense_[f] * hb_;
      for (int k = 0; k < K_; ++k)
        qde_(f, k) = hb_.col(k).dot(y_[f].col(k)).real();
    }
  }
  coord_l_ = coord_n_ = -1;
  base_obj_ = assemble(n_, cross_, s_, qde_);
}

double ScsiObjective::eval(const PhaseConfig& phi) {
  set_base(phi);
  return base_obj_;
}

void ScsiObjective::prepare_coord(int coord) {
  coord_l_ = coord / N_;
  coord_n_ = coord % N_;
  tdot_.resize(L_, K_);
  tn_.resize(L_);
  for (int l = 0; l < L_; ++l) {
    Eigen::VectorXcd t = cache_T_ ? Eigen::VectorXcd(T_[l][coord_l_].col(coord_n_))
                                  : Eigen::VectorXcd(cs_.H1[l].adjoint() *
                                                     cs_.H1[coord_l_].col(coord_n_));
    tn_(l) = t.squaredNorm();
    for (int k = 0; k < K_; ++k) tdot_(l, k) = t.dot(v_[l].col(k));
  }
  if (dense_C_) {
    const Eigen::VectorXcd u = cs_.H1[coord_l_].col(coord_n_);
    uy_.resize(K_, K_);
    updiag_.resize(K_);
    for (int f = 0; f < K_; ++f) {
      for (int k = 0; k < K_; ++k) uy_(f, k) = u.dot(y_[f].col(k));
      updiag_(f) = diagP_[f][coord_l_](coord_n_);
    }
  }
}

double ScsiObjective::eval_perturbed(std::complex<double> dphi) const {
  if (coord_l_ < 0) throw std::logic_error("ScsiObjective: no prepared coordinate");
  const double uu = unorm2_(coord_l_);

  Eigen::VectorXcd delta(K_), unh(K_);
  for (int k = 0; k < K_; ++k) {
    delta(k) = dphi * cs_.hbar_2[coord_l_](coord_n_, k);
    unh(k) = v_[coord_l_](coord_n_, k);  // u^H hb_k
  }

  Eigen::VectorXd n(K_);
  for (int k = 0; k < K_; ++k)
    n(k) = n_(k) + 2.0 * std::real(std::conj(delta(k)) * unh(k)) +
           std::norm(delta(k)) * uu;

  Eigen::MatrixXcd cross(K_, K_);
  for (int f = 0; f < K_; ++f)
    for (int k = 0; k < K_; ++k)
      cross(f, k) = cross_(f, k) + std::conj(delta(f)) * unh(k) +
                    delta(k) * std::conj(unh(f)) +
                    std::conj(delta(f)) * delta(k) * uu;

  Eigen::MatrixXd s(L_, K_);
  for (int l = 0; l < L_; ++l)
    for (int k = 0; k < K_; ++k)
      s(l, k) = s_(l, k) + 2.0 * std::real(std::conj(delta(k)) * tdot_(l, k)) +
                std::norm(delta(k)) * tn_(l);

  Eigen::MatrixXd qde;
  if (dense_C_) {
    qde.resize(K_, K_);
    for (int f = 0; f < K_; ++f)
      for (int k = 0; k < K_; ++k)
        qde(f, k) = qde_(f, k) + 2.0 * std::real(std::conj(delta(k)) * uy_(f, k)) +
                    std::norm(delta(k)) * updiag_(f);
  }
  return assemble(n, cross, s, qde);
}

double ScsiObjective::assemble(const Eigen::VectorXd& n,
                               const Eigen::MatrixXcd& cross,
                               const Eigen::MatrixXd& s,
                               const Eigen::MatrixXd& qde) const {
  double psi = 0.0;
  for (int k = 0; k < K_; ++k) psi += p_(k) * (n(k) + trC_(k));

  const double Msq = static_cast<double>(M_) * M_;
  double obj = 0.0;
  for (int k = 0; k < K_; ++k) {
    const double num = p_(k) * std::pow((n(k) + trC_(k)) / M_, 2);
    double interf = 0.0;
    for (int f = 0; f < K_; ++f) {
      if (f == k) continue;
      const double qB = Bform_.a0(k) * n(f) + Bform_.a.col(k).dot(s.col(f));
      const double qC = dense_C_
                            ? qde(f, k)
                            : Cform_.a0(f) * n(k) + Cform_.a.col(f).dot(s.col(k));
      interf += p_(f) * (std::norm(cross(f, k)) + qB + qC + trCB_(f, k));
    }
    const double gamma = num / (interf / Msq + psi / (Msq * rho_));
    obj += std::log2(1.0 + gamma);
  }
  return loss_ * obj;
}

double objective_scsi(const Scenario& sc, Protocol protocol, const PhaseConfig& phi) {
  phi.require_unit_modulus();
  return net_sum_rate_det(sc, phi, protocol);
}

Eigen::VectorXcd numeric_gradient(ScsiObjective& obj, const PhaseConfig& phi,
                                  double fd_step) {
  obj.set_base(phi);
  const std::complex<double> j(0.0, 1.0);
  Eigen::VectorXcd grad(obj.dim());
  for (int i = 0; i < obj.dim(); ++i) {
    obj.prepare_coord(i);
    const double dre =
        (obj.eval_perturbed(fd_step) - obj.eval_perturbed(-fd_step)) /
        (2.0 * fd_step);
    const double dim =
        (obj.eval_perturbed(j * fd_step) - obj.eval_perturbed(-j * fd_step)) /
        (2.0 * fd_step);
    grad(i) = std::complex<double>(dre, dim);
  }
  return grad;
}

Eigen::VectorXcd numeric_gradient(const Scenario& sc, Protocol protocol,
                                  const PhaseConfig& phi, double fd_step) {
  ScsiObjective obj(sc, build_channel_statics(sc), protocol);
  return numeric_gradient(obj, phi, fd_step);
}

std::pair<PhaseConfig, PgaTrace> pga_optimize(const Scenario& sc,
                                              const ChannelStatics& cs,
                                              Protocol protocol,
                                              const PgaOptions& opts) {
  ScsiObjective obj(sc, cs, protocol);
  const int LN = obj.dim();
  PhaseConfig phi;
  if (opts.init_phi.size() > 0) {
    if (opts.init_phi.size() != LN)
      throw std::invalid_argument("pga_optimize: init_phi size mismatch");
    phi = PhaseConfig::project(opts.init_phi);
  } else if (opts.random_init) {
    phi = PhaseConfig::random(LN, seed_mix(opts.seed, kPgaInitTag));
  } else {
    phi = PhaseConfig::all_ones(LN);
  }

  double f = obj.eval(phi);
  PgaTrace trace;
  trace.objective.push_back(f);
  trace.step.push_back(0.0);

  // The line search starts from the last accepted step expanded once, so the
  // step size can grow again after conservative iterations instead of being
  // capped at mu0 forever.
  double mu_start = opts.mu0;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const Eigen::VectorXcd grad = numeric_gradient(obj, phi, opts.fd_step);
    const double g2 = grad.squaredNorm();
    if (g2 == 0.0) break;

    double mu = mu_start;
    bool accepted = false;
    PhaseConfig cand;
    double fc = 0.0;
    while (mu > 1e-14) {
      cand = PhaseConfig::project(phi.phi + mu * grad);
      fc = obj.eval(cand);
      if (fc >= f + opts.backtrack_c * mu * g2) {
        accepted = true;
        break;
      }
      mu *= opts.backtrack_beta;
    }
    if (!accepted && fc >= f) accepted = true;  // flat step at the mu floor
    if (!accepted) break;

    // Convergence check before committing the step: a below-threshold
    // improvement terminates with the previous iterate (so a huge epsilon
    // returns the initial projection unchanged).
    const double df = fc - f;
    if (df * df < opts.epsilon) break;
    phi = cand;
    f = fc;
    trace.objective.push_back(f);
    trace.step.push_back(mu);
    mu_start = mu / opts.backtrack_beta;
  }
  return {phi, trace};
}

std::pair<PhaseConfig, std::vector<double>> ga_optimize_icsi(
    const Scenario& sc, const ChannelStatics& cs, const EstimateSet& est,
    const GaOptions& opts) {
  if (est.protocol != Protocol::dft || est.links.empty())
    throw std::invalid_argument(
        "ga_optimize_icsi: per-link estimates required (dft protocol only)");
  if (opts.population_size < 2 || opts.generations < 0 ||
      opts.elitism_count < 0 || opts.elitism_count > opts.population_size ||
      opts.tournament_size < 1)
    throw std::invalid_argument("ga_optimize_icsi: invalid GA options");

  const int LN = sc.L() * sc.N();
  const int K = sc.K();
  constexpr double two_pi = 2.0 * std::numbers::pi;

  EstimateSet work = est;  // h_hat rewritten per candidate; C/C_tilde fixed
  auto fitness = [&](const Eigen::VectorXd& theta) {
    const PhaseConfig phase = PhaseConfig::from_angles(theta);
    for (int k = 0; k < K; ++k)
      work.h_hat.col(k) = assemble_dft_estimate(cs, phase, est.links[k], k);
    const Eigen::VectorXd gamma = instantaneous_sinr(work, sc);
    return net_rate(gamma, est.S_real, sc).sum_rate;
  };

  Rng rng(seed_mix(opts.seed, kGaStreamTag));
  auto rand_index = [&](int n) {
    return std::min(n - 1, static_cast<int>(rng.uniform() * n));
  };

  std::vector<Eigen::VectorXd> pop(opts.population_size);
  std::vector<double> fit(opts.population_size);
  for (int i = 0; i < opts.population_size; ++i) {
    pop[i].resize(LN);
    for (int g = 0; g < LN; ++g) pop[i](g) = rng.uniform() * two_pi;
    fit[i] = fitness(pop[i]);
  }

  auto tournament = [&]() -> const Eigen::VectorXd& {
    int best = rand_index(opts.population_size);
    for (int t = 1; t < opts.tournament_size; ++t) {
      const int c = rand_index(opts.population_size);
      if (fit[c] > fit[best]) best = c;
    }
    return pop[best];
  };

  std::vector<double> trace;
  std::vector<int> order(opts.population_size);
  for (int gen = 0; gen < opts.generations; ++gen) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fit[a] > fit[b]; });

    std::vector<Eigen::VectorXd> next(opts.population_size);
    std::vector<double> next_fit(opts.population_size);
    for (int e = 0; e < opts.elitism_count; ++e) {
      next[e] = pop[order[e]];
      next_fit[e] = fit[order[e]];
    }
    for (int i = opts.elitism_count; i < opts.population_size; ++i) {
      Eigen::VectorXd child = tournament();
      if (rng.uniform() < opts.crossover_rate) {
        const Eigen::VectorXd& other = tournament();
        for (int g = 0; g < LN; ++g)
          if (rng.uniform() < 0.5) child(g) = other(g);
      }
      for (int g = 0; g < LN; ++g)
        if (rng.uniform() < opts.mutation_rate) {
          double a = std::fmod(child(g) + opts.mutation_sigma * rng.gauss(), two_pi);
          if (a < 0.0) a += two_pi;
          child(g) = a;
        }
      next_fit[i] = fitness(child);
      next[i] = std::move(child);
    }
    pop = std::move(next);
    fit = std::move(next_fit);
    trace.push_back(*std::max_element(fit.begin(), fit.end()));
  }

  const int best = static_cast<int>(
      std::max_element(fit.begin(), fit.end()) - fit.begin());
  return {PhaseConfig::from_angles(pop[best]), trace};
}

}  // namespace risim
