#include "doctest.h"

#include <cmath>

#include "risim/detequiv.hpp"
#include "risim/montecarlo.hpp"
#include "risim/precoding.hpp"
#include "test_util.hpp"

using namespace risim;

TEST_CASE("near-deterministic channel: sampled SINR matches the exact ratio") {
  // K = 1, huge Rician factors: h is essentially the LoS mean, so the
  // plug-in SINR reduces to p ||hbar||^4 / (Psi / rho)
  Scenario sc = toy_scenario(4, 1, 2, 1, 1);
  sc.links.kappa_dk.setConstant(1e12);
  sc.links.kappa_2lk.setConstant(1e12);
  const ChannelStatics cs = build_channel_statics(sc);
  const PhaseConfig theta = PhaseConfig::random(sc.N(), 3);
  McConfig mc;
  mc.n_samples = 200;
  mc.protocol = Protocol::perfect;
  const McSinrResult res = ergodic_sinr_mc(sc, cs, theta, mc);
  const double trD = los_aggregate(cs, theta, 0).squaredNorm();
  const double psi = psi_deterministic(sc, cs, theta, Protocol::perfect);
  const double want = sc.cfg.p(0) * trD * trD / (psi / sc.rho());
  CHECK(res.gamma(0) == doctest::Approx(want).epsilon(1e-3));
  CHECK(res.psi == doctest::Approx(psi).epsilon(1e-12));
}

TEST_CASE("sampled ergodic SINR tracks the deterministic equivalent") {
  // all-ones phases keep the small-M bias of the closed form low
  const Scenario sc = toy_scenario(16, 4, 4, 4, 4);
  const ChannelStatics cs = build_channel_statics(sc);
  const PhaseConfig theta = PhaseConfig::all_ones(sc.L() * sc.N());
  for (Protocol p : {Protocol::dft, Protocol::de, Protocol::perfect}) {
    McConfig mc;
    mc.n_samples = 4000;
    mc.protocol = p;
    mc.threads = 2;
    const McSinrResult res = ergodic_sinr_mc(sc, cs, theta, mc);
    const Eigen::VectorXd det =
        sinr_det(build_det_stats(sc, cs, p), theta);
    for (int k = 0; k < sc.K(); ++k) {
      CHECK(std::abs(res.gamma(k) - det(k)) < 0.08 * det(k));
      CHECK(res.stderr_jk(k) > 0.0);
      CHECK(res.stderr_jk(k) < 0.05 * res.gamma(k));
    }
  }
}

TEST_CASE("jackknife standard error shrinks like 1/sqrt(n)") {
  const Scenario sc = toy_scenario(8, 2, 2, 2, 2);
  const ChannelStatics cs = build_channel_statics(sc);
  const PhaseConfig theta = PhaseConfig::random(sc.L() * sc.N(), 5);
  McConfig mc;
  mc.protocol = Protocol::de;
  mc.n_samples = 2000;
  const Eigen::VectorXd se1 = ergodic_sinr_mc(sc, cs, theta, mc).stderr_jk;
  mc.n_samples = 8000;
  const Eigen::VectorXd se2 = ergodic_sinr_mc(sc, cs, theta, mc).stderr_jk;
  for (int k = 0; k < sc.K(); ++k)
    CHECK(se1(k) / se2(k) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("results do not depend on the worker partition") {
  const Scenario sc = toy_scenario(6, 2, 2, 2, 3);
  const ChannelStatics cs = build_channel_statics(sc);
  const PhaseConfig theta = PhaseConfig::random(sc.L() * sc.N(), 5);
  for (Protocol p : {Protocol::dft, Protocol::de}) {
    McConfig mc;
    mc.protocol = p;
    mc.n_samples = 300;
    mc.threads = 1;
    const McSinrResult a = ergodic_sinr_mc(sc, cs, theta, mc);
    mc.threads = 3;
    const McSinrResult b = ergodic_sinr_mc(sc, cs, theta, mc);
    mc.threads = 0;  // hardware concurrency
    const McSinrResult c = ergodic_sinr_mc(sc, cs, theta, mc);
    CHECK(a.gamma == b.gamma);  // bitwise
    CHECK(a.gamma == c.gamma);
    CHECK(a.stderr_jk == b.stderr_jk);
  }
}

TEST_CASE("sampled net sum-rate carries the protocol's training charge") {
  const Scenario sc = toy_scenario(8, 2, 2, 2, 2);
  const ChannelStatics cs = build_channel_statics(sc);
  const PhaseConfig theta = PhaseConfig::random(sc.L() * sc.N(), 5);
  McConfig mc;
  mc.protocol = Protocol::dft;
  mc.n_samples = 500;
  const McRateResult res = ergodic_net_sum_rate_mc(sc, cs, theta, mc);
  CHECK(res.S_real == doctest::Approx(subphases_real(sc, Protocol::dft)));
  const RateRecord want = net_rate(res.sinr.gamma, res.S_real, sc);
  CHECK(res.sum_rate == doctest::Approx(want.sum_rate).epsilon(1e-12));
  CHECK((res.rate - want.rate).norm() < 1e-12);
}

TEST_CASE("sample count validation") {
  const Scenario sc = toy_scenario(4, 1, 2, 1, 1);
  const ChannelStatics cs = build_channel_statics(sc);
  const PhaseConfig theta = PhaseConfig::all_ones(sc.N());
  McConfig mc;
  mc.n_samples = 1;
  CHECK_THROWS_AS(ergodic_sinr_mc(sc, cs, theta, mc), std::invalid_argument);
  CHECK_THROWS_AS(validate_covariance(sc, cs, theta, mc), std::invalid_argument);
}

TEST_CASE("estimator second-order statistics match the closed forms") {
  const Scenario sc = toy_scenario(4, 1, 2, 1, 2);
  const ChannelStatics cs = build_channel_statics(sc);
  const PhaseConfig theta = PhaseConfig::random(sc.N(), 8);
  for (Protocol p : {Protocol::dft, Protocol::de, Protocol::perfect}) {
    McConfig mc;
    mc.protocol = p;
    mc.n_samples = 20000;
    const CovarianceCheck chk = validate_covariance(sc, cs, theta, mc);
    for (int k = 0; k < sc.K(); ++k) {
      CHECK(chk.cov_rel_err(k) < 0.10);
      CHECK(chk.orth_rel_err(k) < 0.10);
    }
    // deterministic given the seed
    const CovarianceCheck again = validate_covariance(sc, cs, theta, mc);
    CHECK(chk.cov_rel_err == again.cov_rel_err);
    CHECK(chk.mean_rel_err == again.mean_rel_err);
  }
}
