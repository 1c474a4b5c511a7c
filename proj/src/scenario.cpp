// SPDX-License-Identifier: Apache-2.0
//
// risim: distributed-RIS multi-user MISO downlink simulator.
#include "risim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace risim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

Eigen::Vector3d arc_point(double radius, double angle) {
  return {radius * std::sin(angle), radius * std::cos(angle), 0.0};
}

// cos(AoD) = projection of the unit link direction on the array axis.
double departure_angle(const Eigen::Vector3d& from, const Eigen::Vector3d& to,
                       const Eigen::Vector3d& axis) {
  const double c = (to - from).normalized().dot(axis);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

double pathloss(double C0, double distance, double alpha) {
  return C0 / std::pow(distance, alpha);
}

double rician_factor(double distance) {
  return std::max(0.0, 13.0 - 0.03 * distance);
}

std::pair<int, int> factor_grid(int N) {
  int n1 = 1;
  for (int d = 1; d * d <= N; ++d)
    if (N % d == 0) n1 = d;
  return {n1, N / n1};
}

Eigen::Vector3d Scenario::bs_antenna_position(int m) const {
  return geo.bs + Eigen::Vector3d(0, 0, m * cfg.d_bs * cfg.wavelength);
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> Scenario::ris_axes(int l) const {
  const Eigen::Vector3d n = geo.ris_normals[l];
  Eigen::Vector3d ref = std::abs(n.z()) > 0.99 ? Eigen::Vector3d::UnitX()
                                               : Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d axis2 = ref.cross(n).normalized();  // in-plane horizontal
  const Eigen::Vector3d axis1 = n.cross(axis2).normalized();
  return {axis1, axis2};
}

Eigen::Vector3d Scenario::ris_element_position(int l, int n1, int n2) const {
  const auto [axis1, axis2] = ris_axes(l);
  const double o1 = (n1 - 0.5 * (cfg.N1 - 1)) * cfg.d_ris_1 * cfg.wavelength;
  const double o2 = (n2 - 0.5 * (cfg.N2 - 1)) * cfg.d_ris_2 * cfg.wavelength;
  return geo.ris[l] + o1 * axis1 + o2 * axis2;
}

Geometry default_geometry(const SystemConfig& cfg, double ris_radius,
                          double user_radius, double half_angle_deg) {
  Geometry g;
  const double half = half_angle_deg * kDeg;
  auto spread = [half](int i, int n) {
    return n > 1 ? -half + 2.0 * half * i / (n - 1) : 0.0;
  };
  for (int l = 0; l < cfg.L; ++l) {
    g.ris.push_back(arc_point(ris_radius, spread(l, cfg.L)));
    g.ris_normals.push_back((g.bs - g.ris.back()).normalized());
  }
  for (int k = 0; k < cfg.K; ++k)
    g.users.push_back(arc_point(user_radius, spread(k, cfg.K)));
  return g;
}

Scenario build_scenario(SystemConfig cfg, Geometry geo) {
  if (cfg.M < 1 || cfg.K < 1 || cfg.L < 0 || cfg.N1 < 1 || cfg.N2 < 1)
    throw std::invalid_argument("build_scenario: dimensions must be positive");
  if (cfg.P_max <= 0.0 || cfg.sigma2 <= 0.0)
    throw std::invalid_argument("build_scenario: P_max and sigma2 must be positive");
  if (cfg.rho_p == 0.0) cfg.rho_p = cfg.P_max / cfg.sigma2;
  if (cfg.rho_p <= 0.0) throw std::invalid_argument("build_scenario: rho_p must be positive");
  if (cfg.tau_S == 0.0) cfg.tau_S = static_cast<double>(cfg.K);
  if (cfg.tau_S <= 0.0 || cfg.tau_S > cfg.tau_C)
    throw std::invalid_argument("build_scenario: need 0 < tau_S <= tau_C");
  if (cfg.p.size() == 0)
    cfg.p = Eigen::VectorXd::Constant(cfg.K, 1.0 / cfg.K);
  if (cfg.p.size() != cfg.K || (cfg.p.array() <= 0.0).any())
    throw std::invalid_argument("build_scenario: p must hold K positive entries");
  if (static_cast<int>(geo.ris.size()) != cfg.L ||
      static_cast<int>(geo.users.size()) != cfg.K)
    throw std::invalid_argument("build_scenario: geometry/config size mismatch");
  if (geo.ris_normals.size() != geo.ris.size())
    throw std::invalid_argument("build_scenario: one normal per RIS required");

  Scenario sc;
  sc.cfg = cfg;
  sc.geo = std::move(geo);

  LinkStats& ls = sc.links;
  ls.beta_1l.resize(cfg.L);
  ls.beta_dk.resize(cfg.K);
  ls.kappa_dk.resize(cfg.K);
  ls.phi_dk.resize(cfg.K);
  ls.beta_2lk.resize(cfg.L, cfg.K);
  ls.kappa_2lk.resize(cfg.L, cfg.K);
  ls.phi_2lk.resize(cfg.L, cfg.K);

  auto checked_dist = [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    const double d = (a - b).norm();
    if (d <= 0.0)
      throw std::invalid_argument("build_scenario: zero-length link");
    return d;
  };

  const Eigen::Vector3d bs_axis = Eigen::Vector3d::UnitZ();
  for (int l = 0; l < cfg.L; ++l)
    ls.beta_1l(l) = pathloss(cfg.C0, checked_dist(sc.geo.bs, sc.geo.ris[l]),
                             cfg.alpha_bs_ris);
  for (int k = 0; k < cfg.K; ++k) {
    const double d = checked_dist(sc.geo.bs, sc.geo.users[k]);
    ls.beta_dk(k) = pathloss(cfg.C0, d, cfg.alpha_bs_user);
    ls.kappa_dk(k) = rician_factor(d);
    ls.phi_dk(k) = departure_angle(sc.geo.bs, sc.geo.users[k], bs_axis);
  }
  for (int l = 0; l < cfg.L; ++l) {
    const auto [axis1, axis2] = sc.ris_axes(l);
    (void)axis2;
    for (int k = 0; k < cfg.K; ++k) {
      const double d = checked_dist(sc.geo.ris[l], sc.geo.users[k]);
      ls.beta_2lk(l, k) = pathloss(cfg.C0, d, cfg.alpha_ris_user);
      ls.kappa_2lk(l, k) = rician_factor(d);
      ls.phi_2lk(l, k) = departure_angle(sc.geo.ris[l], sc.geo.users[k], axis1);
    }
  }
  return sc;
}

namespace {

void apply_config_json(SystemConfig& cfg, const nlohmann::json& c) {
  if (c.contains("N")) {
    auto [n1, n2] = factor_grid(c.at("N").get<int>());
    cfg.N1 = n1;
    cfg.N2 = n2;
  }
  if (c.contains("M")) cfg.M = c.at("M").get<int>();
  if (c.contains("K")) cfg.K = c.at("K").get<int>();
  if (c.contains("L")) cfg.L = c.at("L").get<int>();
  if (c.contains("N1")) cfg.N1 = c.at("N1").get<int>();
  if (c.contains("N2")) cfg.N2 = c.at("N2").get<int>();
  if (c.contains("d_bs")) cfg.d_bs = c.at("d_bs").get<double>();
  if (c.contains("d_ris_1")) cfg.d_ris_1 = c.at("d_ris_1").get<double>();
  if (c.contains("d_ris_2")) cfg.d_ris_2 = c.at("d_ris_2").get<double>();
  if (c.contains("wavelength_m")) cfg.wavelength = c.at("wavelength_m").get<double>();
  if (c.contains("P_max_w")) cfg.P_max = c.at("P_max_w").get<double>();
  if (c.contains("P_max_dbm")) cfg.P_max = dbm_to_watts(c.at("P_max_dbm").get<double>());
  if (c.contains("sigma2_w")) cfg.sigma2 = c.at("sigma2_w").get<double>();
  if (c.contains("sigma2_dbm")) cfg.sigma2 = dbm_to_watts(c.at("sigma2_dbm").get<double>());
  if (c.contains("rho_p")) cfg.rho_p = c.at("rho_p").get<double>();
  if (c.contains("rho_p_db")) cfg.rho_p = db_to_lin(c.at("rho_p_db").get<double>());
  if (c.contains("tau_S")) cfg.tau_S = c.at("tau_S").get<double>();
  if (c.contains("tau_C")) cfg.tau_C = c.at("tau_C").get<double>();
  if (c.contains("p")) {
    const auto v = c.at("p").get<std::vector<double>>();
    cfg.p = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  }
  if (c.contains("C0_db")) cfg.C0 = db_to_lin(-c.at("C0_db").get<double>());
  if (c.contains("alpha_bs_ris")) cfg.alpha_bs_ris = c.at("alpha_bs_ris").get<double>();
  if (c.contains("alpha_ris_user")) cfg.alpha_ris_user = c.at("alpha_ris_user").get<double>();
  if (c.contains("alpha_bs_user")) cfg.alpha_bs_user = c.at("alpha_bs_user").get<double>();
  if (c.contains("perfect_csi_subphases"))
    cfg.perfect_csi_subphases = c.at("perfect_csi_subphases").get<double>();
}

Eigen::Vector3d vec3(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

Geometry geometry_from_json(const SystemConfig& cfg, const nlohmann::json& g) {
  if (g.contains("ris_m") || g.contains("users_m")) {
    Geometry geo;
    if (g.contains("bs_m")) geo.bs = vec3(g.at("bs_m"));
    for (const auto& r : g.at("ris_m")) geo.ris.push_back(vec3(r));
    for (const auto& u : g.at("users_m")) geo.users.push_back(vec3(u));
    if (g.contains("ris_normals")) {
      for (const auto& n : g.at("ris_normals"))
        geo.ris_normals.push_back(vec3(n).normalized());
    } else {
      for (const auto& r : geo.ris)
        geo.ris_normals.push_back((geo.bs - r).normalized());
    }
    return geo;
  }
  return default_geometry(cfg, g.value("ris_arc_radius_m", 250.0),
                          g.value("user_arc_radius_m", 400.0),
                          g.value("arc_half_angle_deg", 30.0));
}

}  // namespace

Scenario scenario_from_json(const nlohmann::json& j) {
  SystemConfig cfg;
  if (j.contains("config")) apply_config_json(cfg, j.at("config"));
  Geometry geo = j.contains("geometry")
                     ? geometry_from_json(cfg, j.at("geometry"))
                     : default_geometry(cfg);
  return build_scenario(cfg, std::move(geo));
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_scenario: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return scenario_from_json(j);
}

Scenario default_figure_scenario(const std::string& figure_id,
                                 const nlohmann::json& overrides) {
  nlohmann::json j;
  if (figure_id == "fig2" || figure_id == "fig3") {
    j["config"] = {{"M", 60}, {"N", 60}, {"L", 20}, {"K", 20}};
  } else if (figure_id == "fig4") {
    j["config"] = {{"M", 60}, {"N", 100}, {"L", 20}, {"K", 20}};
  } else {
    throw std::invalid_argument("default_figure_scenario: unknown figure id '" +
                                figure_id + "'");
  }
  if (overrides.contains("config"))
    j["config"].update(overrides.at("config"));
  if (overrides.contains("geometry"))
    j["geometry"] = overrides.at("geometry");
  // bare keys are treated as config overrides
  for (const auto& [key, val] : overrides.items())
    if (key != "config" && key != "geometry") j["config"][key] = val;
  return scenario_from_json(j);
}

}  // namespace risim
