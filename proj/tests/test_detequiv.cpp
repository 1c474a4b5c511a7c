#include "doctest.h"

#include <cmath>

#include "risim/detequiv.hpp"
#include "risim/rng.hpp"
#include "test_util.hpp"

using namespace risim;

namespace {

// Short-range toy with order-one path gains so that finite training SNR
// limits are sharp: everything within a few meters, no reference attenuation.
Scenario close_toy(int M, int N1, int N2, int L, int K,
                   nlohmann::json extra = nlohmann::json::object()) {
  nlohmann::json cfg = {{"M", M}, {"N1", N1}, {"N2", N2}, {"L", L}, {"K", K},
                        {"C0_db", 0.0}};
  cfg.update(extra);
  nlohmann::json j = {{"config", cfg},
                      {"geometry",
                       {{"ris_arc_radius_m", 2.0},
                        {"user_arc_radius_m", 3.0},
                        {"arc_half_angle_deg", 25.0}}}};
  return risim::scenario_from_json(j);
}

}  // namespace

TEST_CASE("infinite-training-SNR limit collapses onto the perfect-CSI form") {
  Rng dims(2024);
  for (int t = 0; t < 10; ++t) {
    const int M = 2 + int(dims.uniform() * 5);
    const int N1 = 1 + int(dims.uniform() * 2);
    const int N2 = 1 + int(dims.uniform() * 2);
    const int L = int(dims.uniform() * 4);
    const int K = 1 + int(dims.uniform() * 3);
    const Scenario sc = close_toy(M, N1, N2, L, K, {{"rho_p", 1e12}});
    const PhaseConfig theta = PhaseConfig::random(L * N1 * N2, 100 + t);
    const Eigen::VectorXd gp = sinr_det_perfect(sc, theta);
    for (Protocol p : {Protocol::dft, Protocol::de}) {
      const Eigen::VectorXd g = p == Protocol::dft ? sinr_det_dft(sc, theta)
                                                   : sinr_det_de(sc, theta);
      for (int k = 0; k < K; ++k)
        CHECK(std::abs(g(k) - gp(k)) <= 1e-6 * gp(k));
    }
  }
}

TEST_CASE("with no RIS panels the formula reduces to the direct-link one") {
  Rng dims(77);
  for (int t = 0; t < 10; ++t) {
    const int M = 2 + int(dims.uniform() * 5);
    const int K = 1 + int(dims.uniform() * 3);
    const Scenario sc =
        t % 2 ? close_toy(M, 1, 1, 0, K)
              : default_figure_scenario("fig2", {{"M", M}, {"K", K}, {"L", 0},
                                                 {"N1", 1}, {"N2", 1}});
    const PhaseConfig none = PhaseConfig::all_ones(0);
    const Eigen::VectorXd direct = sinr_det_noris(sc);
    for (const Eigen::VectorXd& g : {sinr_det_de(sc, none), sinr_det_dft(sc, none)})
      for (int k = 0; k < K; ++k)
        CHECK(std::abs(g(k) - direct(k)) <= 1e-12 * direct(k));
  }
}

TEST_CASE("single user: interference-free closed form") {
  // NL/M = 3 exactly, so the sampled and charged sub-phase counts agree
  const Scenario sc = close_toy(4, 2, 2, 3, 1);
  const ChannelStatics cs = build_channel_statics(sc);
  const PhaseConfig theta = PhaseConfig::random(sc.L() * sc.N(), 5);
  for (Protocol p : {Protocol::dft, Protocol::de, Protocol::perfect}) {
    const double trD = los_aggregate(cs, theta, 0).squaredNorm();
    const double trC =
        estimate_covariance(sc, cs, p).C[0].trace().real();
    // gamma = p (tr(D+C)/M)^2 / (Psi / (M^2 rho)) = p (trD + trC) rho
    const double want = sc.cfg.p(0) * (trD + trC) * sc.rho();
    const DetStats st = build_det_stats(sc, cs, p);
    CHECK(sinr_det(st, theta)(0) == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("positivity and more-antennas-help monotonicity") {
  // noise-limited regime (distant users): doubling the array grows the
  // coherent beamforming gain faster than the interference
  const PhaseConfig theta = PhaseConfig::all_ones(3 * 4);
  const Scenario small = toy_scenario(4, 2, 2, 3, 3);
  const Scenario big = toy_scenario(8, 2, 2, 3, 3);
  for (Protocol p : {Protocol::dft, Protocol::de, Protocol::perfect}) {
    const Eigen::VectorXd gs = p == Protocol::dft   ? sinr_det_dft(small, theta)
                               : p == Protocol::de ? sinr_det_de(small, theta)
                                                   : sinr_det_perfect(small, theta);
    const Eigen::VectorXd gb = p == Protocol::dft   ? sinr_det_dft(big, theta)
                               : p == Protocol::de ? sinr_det_de(big, theta)
                                                   : sinr_det_perfect(big, theta);
    CHECK((gs.array() > 0.0).all());
    for (int k = 0; k < 3; ++k) CHECK(gb(k) > gs(k));
  }
}

TEST_CASE("net sum-rate is the overhead-discounted log throughput") {
  const Scenario sc = close_toy(4, 2, 2, 3, 2);
  const ChannelStatics cs = build_channel_statics(sc);
  const PhaseConfig theta = PhaseConfig::random(sc.L() * sc.N(), 9);
  for (Protocol p : {Protocol::dft, Protocol::de, Protocol::perfect}) {
    const DetStats st = build_det_stats(sc, cs, p);
    const Eigen::VectorXd g = sinr_det(st, theta);
    const double want =
        st.loss_factor() * ((1.0 + g.array()).log() / std::log(2.0)).sum();
    CHECK(net_sum_rate_det(st, theta) == doctest::Approx(want).epsilon(1e-12));
    CHECK(net_sum_rate_det(sc, theta, p) == doctest::Approx(want).epsilon(1e-12));
  }
  // training loss factors per protocol
  CHECK(build_det_stats(sc, cs, Protocol::de).loss_factor() ==
        doctest::Approx(1.0 - sc.cfg.tau_S / sc.cfg.tau_C));
  CHECK(build_det_stats(sc, cs, Protocol::perfect).loss_factor() ==
        doctest::Approx(1.0));
}

TEST_CASE("no-RIS net sum-rate accounting") {
  const Scenario sc = close_toy(4, 1, 1, 0, 2);
  const Eigen::VectorXd g = sinr_det_noris(sc);
  const double loss = 1.0 - sc.cfg.tau_S / sc.cfg.tau_C;
  CHECK(net_sum_rate_det_noris(sc, Protocol::de) ==
        doctest::Approx(loss * ((1.0 + g.array()).log() / std::log(2.0)).sum())
            .epsilon(1e-12));
  // perfect baseline charges no training and uses noiseless estimates
  const double rp = net_sum_rate_det_noris(sc, Protocol::perfect);
  CHECK(rp >= net_sum_rate_det_noris(sc, Protocol::de));
}

TEST_CASE("coherence block exhausted by training is rejected") {
  // N L / M + 1 sub-phases of tau_S symbols must fit into tau_C
  const Scenario sc = close_toy(2, 2, 2, 3, 2, {{"tau_S", 100.0}, {"tau_C", 500.0}});
  const PhaseConfig theta = PhaseConfig::all_ones(sc.L() * sc.N());
  CHECK_THROWS_AS(net_sum_rate_det(sc, theta, Protocol::dft), std::runtime_error);
  // de consumes a single sub-phase and survives
  CHECK(net_sum_rate_det(sc, theta, Protocol::de) > 0.0);
}
