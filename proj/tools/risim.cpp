// SPDX-License-Identifier: Apache-2.0
//
// risim command-line interface: experiment runner and self checks.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "risim/detequiv.hpp"
#include "risim/experiment.hpp"
#include "risim/montecarlo.hpp"
#include "risim/rng.hpp"

namespace {

struct CommonFlags {
  std::uint64_t seed = 0;  // 0 -> keep config value
  int samples = -1;        // <0 -> keep config value
  std::string out;
  std::string format;
  int threads = 0;  // 0 -> keep config / env default
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "Master RNG seed (overrides config)");
  cmd->add_option("--samples", f.samples,
                  "Monte-Carlo samples per point; 0 disables MC outputs");
  cmd->add_option("--out", f.out, "Output file path (default: stdout)");
  cmd->add_option("--format", f.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", f.threads,
                  "Worker threads (default: RISIM_THREADS env or 1)");
}

void apply_common(risim::Experiment& exp, const CommonFlags& f) {
  if (f.seed != 0) exp.mc.seed = f.seed;
  if (f.samples >= 0) exp.mc.n_samples = f.samples;
  if (!f.out.empty()) exp.out_path = f.out;
  if (!f.format.empty()) exp.format = f.format;
  if (f.threads > 0) {
    exp.mc.threads = f.threads;
  } else if (const char* env = std::getenv("RISIM_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) exp.mc.threads = t;
  }
}

int run_and_emit(const risim::Experiment& exp) {
  const risim::ResultTable table = risim::run_experiment(exp);
  if (exp.out_path.empty())
    std::cout << risim::results_to_string(table, exp.format);
  else
    risim::emit_results(table, exp.out_path, exp.format);
  int failures = 0;
  for (const auto& r : table.rows)
    if (!r.error.empty()) {
      std::cerr << "point " << r.sweep_axis << "=" << r.sweep_value << " "
                << r.protocol << "/" << r.design << ": " << r.error << "\n";
      ++failures;
    }
  return failures == 0 ? 0 : 1;
}

struct Check {
  const char* name;
  bool ok;
  std::string detail;
};

int selftest() {
  using namespace risim;
  std::vector<Check> checks;
  auto add = [&checks](const char* name, bool ok, std::string detail = "") {
    checks.push_back({name, ok, std::move(detail)});
  };
  char buf[128];

  // Toy scenario shared by the checks.
  const Scenario sc = default_figure_scenario(
      "fig2", nlohmann::json{{"M", 8}, {"N", 4}, {"L", 2}, {"K", 3}});
  const ChannelStatics cs = build_channel_statics(sc);
  const int LN = sc.L() * sc.N();
  const PhaseConfig theta = PhaseConfig::random(LN, 7);

  // Unit-modulus projection is idempotent.
  {
    const Eigen::VectorXcd x = PhaseConfig::random(LN, 9).phi * 2.7;
    const PhaseConfig p1 = PhaseConfig::project(x);
    const PhaseConfig p2 = PhaseConfig::project(p1.phi);
    add("projection_idempotent", (p1.phi - p2.phi).norm() < 1e-12 &&
                                     p1.unit_modulus(1e-12));
  }

  // Rank-one LoS outer product equals its four-term expansion.
  {
    double err = 0.0;
    for (int k = 0; k < sc.K(); ++k)
      err = std::max(err, (los_outer(cs, theta, k) -
                           los_outer_expanded(cs, theta, k))
                              .norm());
    std::snprintf(buf, sizeof(buf), "max dev %.3g", err);
    add("los_outer_expansion", err < 1e-12, buf);
  }

  // DFT training matrix has orthogonal columns at S = NL + 1.
  {
    const int S = sc.N() * sc.L() + 1;
    const Eigen::MatrixXcd V = dft_training_matrix(S, sc.N(), sc.L());
    const double err =
        (V.adjoint() * V - double(S) * Eigen::MatrixXcd::Identity(
                                           V.cols(), V.cols()))
            .norm();
    std::snprintf(buf, sizeof(buf), "residual %.3g", err);
    add("dft_training_orthogonal", err < 1e-8, buf);
  }

  // Sampled estimator statistics match the closed-form covariances.
  for (const Protocol pr : {Protocol::dft, Protocol::de}) {
    McConfig mc;
    mc.n_samples = 4000;
    mc.seed = 11;
    mc.protocol = pr;
    const CovarianceCheck cc = validate_covariance(sc, cs, theta, mc);
    const double worst =
        std::max(cc.cov_rel_err.maxCoeff(), cc.mean_rel_err.maxCoeff());
    std::snprintf(buf, sizeof(buf), "max rel err %.3g", worst);
    add(pr == Protocol::dft ? "covariance_dft" : "covariance_de", worst < 0.15,
        buf);
  }

  // Monte-Carlo ergodic SINR is consistent with the deterministic equivalent.
  for (const Protocol pr : {Protocol::dft, Protocol::de}) {
    McConfig mc;
    mc.n_samples = 4000;
    mc.seed = 13;
    mc.protocol = pr;
    const McSinrResult r = ergodic_sinr_mc(sc, cs, theta, mc);
    const Eigen::VectorXd det =
        sinr_det(build_det_stats(sc, cs, pr), theta);
    const double err =
        ((r.gamma - det).cwiseAbs().array() / det.array()).maxCoeff();
    std::snprintf(buf, sizeof(buf), "max rel dev %.3g", err);
    add(pr == Protocol::dft ? "mc_consistency_dft" : "mc_consistency_de",
        err < 0.20, buf);
  }

  // Per-user deterministic SINR ordering across estimation quality.
  {
    const Eigen::VectorXd gp = sinr_det_perfect(sc, theta);
    const Eigen::VectorXd gd = sinr_det_dft(sc, theta);
    const Eigen::VectorXd ge = sinr_det_de(sc, theta);
    const bool ok = (gp.array() >= gd.array() * (1.0 - 1e-9)).all() &&
                    (gd.array() >= ge.array() * (1.0 - 1e-9)).all();
    add("sinr_ordering", ok);
  }

  // PGA accepted-objective trace is non-decreasing.
  {
    PgaOptions po;
    po.max_iters = 10;
    const auto [phi, trace] = pga_optimize(sc, cs, Protocol::dft, po);
    bool mono = phi.unit_modulus(1e-9);
    for (std::size_t i = 1; i < trace.objective.size(); ++i)
      mono = mono && trace.objective[i] >= trace.objective[i - 1] - 1e-12;
    add("pga_trace_monotone", mono);
  }

  // GA on one realization's estimates is seed-reproducible.
  {
    const ChannelRealization r = sample_channels(sc, cs, theta, 17);
    const EstimateSet est = estimate(sc, cs, theta, r, Protocol::dft, 17);
    GaOptions go;
    go.population_size = 10;
    go.generations = 5;
    const auto a = ga_optimize_icsi(sc, cs, est, go);
    const auto b = ga_optimize_icsi(sc, cs, est, go);
    add("ga_reproducible", (a.first.phi - b.first.phi).norm() == 0.0 &&
                               a.second == b.second);
  }

  int failed = 0;
  for (const auto& c : checks) {
    std::cout << (c.ok ? "PASS" : "FAIL") << " " << c.name;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
    if (!c.ok) ++failed;
  }
  std::cout << (failed == 0 ? "selftest: all checks passed"
                            : "selftest: FAILURES")
            << "\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"risim: distributed-RIS multi-user MISO downlink simulator"};
  app.require_subcommand(1);

  std::string config_path, preset_name, override_json;
  CommonFlags flags;

  CLI::App* cmd_run = app.add_subcommand("run", "Run an experiment config (JSON)");
  cmd_run->add_option("config", config_path, "Experiment JSON file")->required();
  add_common(cmd_run, flags);

  CLI::App* cmd_preset =
      app.add_subcommand("preset", "Run a built-in figure preset");
  cmd_preset->add_option("name", preset_name, "fig2 | fig3 | fig4")->required();
  cmd_preset->add_option("--override", override_json,
                         "JSON object merged into the scenario config, e.g. "
                         "'{\"M\":8,\"N\":4}'");
  add_common(cmd_preset, flags);

  CLI::App* cmd_validate =
      app.add_subcommand("validate", "Parse and validate an experiment config");
  cmd_validate->add_option("config", config_path, "Experiment JSON file")
      ->required();

  app.add_subcommand("selftest",
                     "Run the deterministic invariant suite at toy dimensions");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      risim::Experiment exp = risim::load_experiment(config_path);
      apply_common(exp, flags);
      return run_and_emit(exp);
    }
    if (cmd_preset->parsed()) {
      risim::Experiment exp = risim::preset_experiment(preset_name);
      if (!override_json.empty()) {
        const nlohmann::json o = nlohmann::json::parse(override_json);
        for (const auto& [key, val] : o.items())
          exp.scenario_template["config"][key] = val;
      }
      apply_common(exp, flags);
      return run_and_emit(exp);
    }
    if (cmd_validate->parsed()) {
      const risim::Experiment exp = risim::load_experiment(config_path);
      // also check the scenario template builds at the first sweep point
      nlohmann::json tpl = exp.scenario_template;
      const std::string key =
          exp.sweep_axis == "P_max" ? "P_max_w" : exp.sweep_axis;
      if (exp.sweep_axis == "P_max")
        tpl["config"][key] = exp.sweep_values.front();
      else
        tpl["config"][key] = static_cast<int>(exp.sweep_values.front());
      (void)risim::scenario_from_json(tpl);
      std::cout << "ok: " << exp.sweep_values.size() << " sweep points, "
                << exp.protocols.size() << " protocols, "
                << exp.designs.size() << " designs\n";
      return 0;
    }
    return selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
