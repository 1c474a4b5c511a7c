#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "risim/scenario.hpp"
#include "test_util.hpp"

using namespace risim;

TEST_CASE("pathloss closed form") {
  CHECK(pathloss(1e-3, 1.0, 3.5) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(pathloss(1e-3, 2.0, 2.0) == doctest::Approx(2.5e-4).epsilon(1e-12));
  // strictly decreasing in distance for positive exponents
  CHECK(pathloss(1e-3, 100.0, 2.8) > pathloss(1e-3, 200.0, 2.8));
}

TEST_CASE("rician factor piecewise-linear law") {
  CHECK(rician_factor(400.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rician_factor(500.0) == doctest::Approx(0.0));
  CHECK(rician_factor(100.0) == doctest::Approx(10.0).epsilon(1e-12));
  // non-increasing, clamped at zero
  CHECK(rician_factor(600.0) == doctest::Approx(0.0));
  CHECK(rician_factor(50.0) >= rician_factor(150.0));
}

TEST_CASE("grid factorization: largest divisor <= sqrt(N)") {
  CHECK(factor_grid(60) == std::pair<int, int>{6, 10});
  CHECK(factor_grid(4) == std::pair<int, int>{2, 2});
  CHECK(factor_grid(7) == std::pair<int, int>{1, 7});
  CHECK(factor_grid(1) == std::pair<int, int>{1, 1});
}

TEST_CASE("default figure scenarios") {
  const Scenario sc = default_figure_scenario("fig2");
  CHECK(sc.M() == 60);
  CHECK(sc.K() == 20);
  CHECK(sc.L() == 20);
  CHECK(sc.N() == 60);
  // placeholders resolved
  CHECK(sc.cfg.tau_S == doctest::Approx(20.0));
  CHECK(sc.cfg.rho_p == doctest::Approx(sc.cfg.P_max / sc.cfg.sigma2));
  CHECK(sc.cfg.p.size() == 20);
  CHECK(sc.cfg.p(0) == doctest::Approx(1.0 / 20.0));

  CHECK_THROWS_AS(default_figure_scenario("fig99"), std::invalid_argument);

  // bare-key overrides merge into the config block
  const Scenario sc2 = default_figure_scenario("fig2", {{"M", 8}, {"L", 0}});
  CHECK(sc2.M() == 8);
  CHECK(sc2.L() == 0);
  CHECK(sc2.geo.ris.empty());
}

TEST_CASE("link statistics from the default arc geometry") {
  const Scenario sc = default_figure_scenario("fig2");
  // all users sit beyond 1 m, so beta < C0; paths are attenuating
  CHECK((sc.links.beta_dk.array() > 0.0).all());
  CHECK((sc.links.beta_dk.array() <= 1e-3).all());
  CHECK((sc.links.beta_1l.array() > 0.0).all());
  CHECK((sc.links.beta_2lk.array() > 0.0).all());
  CHECK((sc.links.kappa_dk.array() >= 0.0).all());
  CHECK((sc.links.kappa_2lk.array() >= 0.0).all());
  // users on a 400 m arc: direct-path Rician factor is max(0, 13 - 0.03*400) = 1
  for (int k = 0; k < sc.K(); ++k)
    CHECK(sc.links.kappa_dk(k) == doctest::Approx(1.0).epsilon(1e-9));
  // RIS-user distances are shorter than BS-user distances on these arcs,
  // so RIS-user links keep a larger Rician factor
  CHECK(sc.links.kappa_2lk.minCoeff() > sc.links.kappa_dk.maxCoeff());
}

TEST_CASE("geometry accessors match the configured spacings") {
  const Scenario sc = toy_scenario(4, 2, 3, 2, 2);
  const double lam = sc.cfg.wavelength;
  // ULA along z with spacing d_bs wavelengths
  const Eigen::Vector3d a0 = sc.bs_antenna_position(0);
  const Eigen::Vector3d a1 = sc.bs_antenna_position(1);
  CHECK((a1 - a0).norm() == doctest::Approx(sc.cfg.d_bs * lam).epsilon(1e-12));
  CHECK((a1 - a0).normalized().dot(Eigen::Vector3d::UnitZ()) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // RIS grid spacings along its two in-plane axes
  const Eigen::Vector3d e00 = sc.ris_element_position(0, 0, 0);
  const Eigen::Vector3d e10 = sc.ris_element_position(0, 1, 0);
  const Eigen::Vector3d e01 = sc.ris_element_position(0, 0, 1);
  CHECK((e10 - e00).norm() == doctest::Approx(sc.cfg.d_ris_1 * lam).epsilon(1e-12));
  CHECK((e01 - e00).norm() == doctest::Approx(sc.cfg.d_ris_2 * lam).epsilon(1e-12));
  // grid is centered on the panel position
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (int n1 = 0; n1 < 2; ++n1)
    for (int n2 = 0; n2 < 3; ++n2) centroid += sc.ris_element_position(0, n1, n2);
  centroid /= 6.0;
  CHECK((centroid - sc.geo.ris[0]).norm() < 1e-9);
}

TEST_CASE("build_scenario validation") {
  using nlohmann::json;
  CHECK_THROWS_AS(toy_scenario(0, 2, 2, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(toy_scenario(4, 2, 2, 1, 2, json{{"P_max_w", 0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(toy_scenario(4, 2, 2, 1, 2, json{{"sigma2_w", -1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(toy_scenario(4, 2, 2, 1, 2, json{{"tau_S", 3000.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(toy_scenario(4, 2, 2, 1, 2, json{{"rho_p", -5.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(toy_scenario(4, 2, 2, 1, 2, json{{"p", {0.5}}}),
                  std::invalid_argument);
  // colocated BS and user -> zero-length link
  nlohmann::json j = {{"config", {{"M", 2}, {"N1", 1}, {"N2", 1}, {"L", 1}, {"K", 1}}},
                      {"geometry",
                       {{"bs_m", {0.0, 0.0, 0.0}},
                        {"ris_m", {{10.0, 0.0, 0.0}}},
                        {"users_m", {{0.0, 0.0, 0.0}}}}}};
  CHECK_THROWS_AS(scenario_from_json(j), std::invalid_argument);
}

TEST_CASE("json unit conversions") {
  using nlohmann::json;
  const Scenario sc =
      toy_scenario(4, 2, 2, 1, 2,
                   json{{"P_max_dbm", 30.0}, {"sigma2_dbm", -90.0}, {"rho_p_db", 20.0}});
  CHECK(sc.cfg.P_max == doctest::Approx(1.0).epsilon(1e-12));        // 30 dBm = 1 W
  CHECK(sc.cfg.sigma2 == doctest::Approx(1e-12).epsilon(1e-12));     // -90 dBm
  CHECK(sc.cfg.rho_p == doctest::Approx(100.0).epsilon(1e-12));      // 20 dB
  // N key factors the grid automatically (explicit N1/N2 take precedence)
  const Scenario sc2 = scenario_from_json(
      json{{"config", {{"M", 4}, {"K", 2}, {"L", 1}, {"N", 60}}}});
  CHECK(sc2.cfg.N1 == 6);
  CHECK(sc2.cfg.N2 == 10);
  const Scenario sc3 = toy_scenario(4, 2, 2, 1, 2, json{{"N", 60}});
  CHECK(sc3.N() == 4);
}

TEST_CASE("fig4 sweep dimensions give the expected training overhead count") {
  // (N L / M + 1) sub-phases at N = 320, L = 20, M = 60, tau_S = K = 20:
  // overhead = (320*20/60 + 1) * 20 = 2153.33... symbols
  const Scenario sc = default_figure_scenario("fig4", {{"N", 320}});
  const double S_real = sc.N() * sc.L() / static_cast<double>(sc.M()) + 1.0;
  CHECK(S_real * sc.cfg.tau_S == doctest::Approx(2153.3333333333335).epsilon(1e-12));
}

TEST_CASE("build_scenario is a pure function of its inputs") {
  const Scenario a = default_figure_scenario("fig3");
  const Scenario b = default_figure_scenario("fig3");
  CHECK(a.links.beta_2lk == b.links.beta_2lk);
  CHECK(a.links.phi_2lk == b.links.phi_2lk);
  CHECK(a.links.kappa_dk == b.links.kappa_dk);
}
