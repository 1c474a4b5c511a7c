// SPDX-License-Identifier: Apache-2.0
//
// risim: distributed-RIS multi-user MISO downlink simulator.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "json.hpp"

namespace risim {

// Static system parameters. Spacings are in carrier wavelengths, powers in
// watts, training quantities in symbols. Zero-valued rho_p / tau_S / p are
// placeholders resolved to their defaults by build_scenario.
struct SystemConfig {
  int M = 60;  // BS antennas
  int K = 20;  // users
  int L = 20;  // RIS panels
  int N1 = 6;  // RIS grid rows
  int N2 = 10; // RIS grid columns

  double d_bs = 0.5;
  double d_ris_1 = 0.5;
  double d_ris_2 = 0.5;
  double wavelength = 0.1;  // meters

  double P_max = 10.0;                       // watts
  double sigma2 = 3.9810717055349695e-13;    // watts (-94 dBm)
  double rho_p = 0.0;                        // training SNR, linear; 0 -> P_max / sigma2
  double tau_S = 0.0;                        // symbols per training sub-phase; 0 -> K
  double tau_C = 2000.0;                     // coherence block length, symbols
  Eigen::VectorXd p;                         // per-user power allocation; empty -> 1/K

  double C0 = 1e-3;  // path loss at 1 m (30 dB attenuation)
  double alpha_bs_ris = 2.0;
  double alpha_ris_user = 2.8;
  double alpha_bs_user = 3.5;

  // Sub-phases charged against the coherence block for perfect-CSI rates.
  // Default 0: perfect-CSI curves carry no training loss.
  double perfect_csi_subphases = 0.0;

  int N() const { return N1 * N2; }
};

struct Geometry {
  Eigen::Vector3d bs = Eigen::Vector3d::Zero();
  std::vector<Eigen::Vector3d> ris;
  std::vector<Eigen::Vector3d> users;
  std::vector<Eigen::Vector3d> ris_normals;  // unit normals, one per RIS
};

// Per-link large-scale statistics derived from the geometry.
struct LinkStats {
  Eigen::VectorXd beta_1l;   // [L]
  Eigen::VectorXd beta_dk;   // [K]
  Eigen::MatrixXd beta_2lk;  // [L x K]
  Eigen::VectorXd kappa_dk;  // [K]
  Eigen::MatrixXd kappa_2lk; // [L x K]
  Eigen::VectorXd phi_dk;    // [K] departure angle at the BS, radians
  Eigen::MatrixXd phi_2lk;   // [L x K] departure angle at RIS l, radians
};

// Immutable bundle of config + geometry + link statistics. Safe to share
// across threads by const reference.
struct Scenario {
  SystemConfig cfg;
  Geometry geo;
  LinkStats links;

  int M() const { return cfg.M; }
  int K() const { return cfg.K; }
  int L() const { return cfg.L; }
  int N() const { return cfg.N(); }
  double rho() const { return cfg.P_max / cfg.sigma2; }

  // BS is a ULA along the z axis anchored at geo.bs.
  Eigen::Vector3d bs_antenna_position(int m) const;
  // In-plane axes of RIS l's rectangular grid: {axis1 (rows, spacing
  // d_ris_1), axis2 (columns, spacing d_ris_2)}.
  std::pair<Eigen::Vector3d, Eigen::Vector3d> ris_axes(int l) const;
  // Element (n1, n2), 0-based; grid centered on geo.ris[l].
  Eigen::Vector3d ris_element_position(int l, int n1, int n2) const;
};

double pathloss(double C0, double distance, double alpha);
double rician_factor(double distance);  // max(0, 13 - 0.03 d), linear

// Arc layout: RISs on a 250 m arc, users on a 400 m arc, both spanning
// [-30 deg, +30 deg] about the y axis, equally spaced in angle, height 0.
Geometry default_geometry(const SystemConfig& cfg, double ris_radius = 250.0,
                          double user_radius = 400.0,
                          double half_angle_deg = 30.0);

Scenario build_scenario(SystemConfig cfg, Geometry geo);

// figure_id in {fig2, fig3, fig4}; overrides use the JSON schema below.
Scenario default_figure_scenario(const std::string& figure_id,
                                 const nlohmann::json& overrides = nlohmann::json::object());

// JSON schema (all keys optional unless the default is unusable):
//   config:
//     M, K, L, N1, N2            integers; or N (grid factored automatically)
//     d_bs, d_ris_1, d_ris_2     spacings in wavelengths
//     wavelength_m
//     P_max_w        | P_max_dbm
//     sigma2_w       | sigma2_dbm
//     rho_p          | rho_p_db      (linear | dB)
//     tau_S, tau_C                symbols
//     p                           array of K per-user powers
//     C0_db, alpha_bs_ris, alpha_ris_user, alpha_bs_user
//     perfect_csi_subphases
//   geometry:
//     ris_arc_radius_m, user_arc_radius_m, arc_half_angle_deg
//     or explicit bs_m [3], ris_m [L][3], users_m [K][3], ris_normals [L][3]
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

// Grid factorization used when only N is given: largest divisor <= sqrt(N).
std::pair<int, int> factor_grid(int N);

}  // namespace risim
