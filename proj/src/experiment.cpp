// SPDX-License-Identifier: Apache-2.0
//
// risim: distributed-RIS multi-user MISO downlink simulator.
#include "risim/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include "risim/detequiv.hpp"
#include "risim/rng.hpp"

namespace risim {

namespace {

constexpr std::uint64_t kRowSeedTag = 30;
constexpr std::uint64_t kRandomPhaseTag = 31;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

const std::set<std::string> kAxes = {"P_max", "N", "M", "K", "L"};
const std::set<std::string> kOutputs = {"sinr_det",    "sinr_mc",
                                        "netrate_det", "netrate_mc",
                                        "netrate_inst", "overhead"};

}  // namespace

const char* ris_design_name(RisDesign d) {
  switch (d) {
    case RisDesign::random: return "random";
    case RisDesign::scsi_pga: return "scsi_pga";
    case RisDesign::icsi_ga: return "icsi_ga";
    case RisDesign::none: return "none";
  }
  return "?";
}

RisDesign ris_design_from_name(const std::string& name) {
  if (name == "random") return RisDesign::random;
  if (name == "scsi_pga") return RisDesign::scsi_pga;
  if (name == "icsi_ga") return RisDesign::icsi_ga;
  if (name == "none") return RisDesign::none;
  throw std::invalid_argument("unknown ris design '" + name + "'");
}

Experiment experiment_from_json(const nlohmann::json& j) {
  Experiment e;
  e.scenario_template = j.value("scenario", nlohmann::json::object());
  if (!j.contains("sweep"))
    throw std::invalid_argument("experiment: missing 'sweep'");
  e.sweep_axis = j.at("sweep").at("axis").get<std::string>();
  if (!kAxes.count(e.sweep_axis))
    throw std::invalid_argument("experiment: unknown sweep axis '" + e.sweep_axis + "'");
  e.sweep_values = j.at("sweep").at("values").get<std::vector<double>>();
  if (e.sweep_values.empty())
    throw std::invalid_argument("experiment: empty sweep value list");

  if (!j.contains("protocols") || j.at("protocols").empty())
    throw std::invalid_argument("experiment: non-empty 'protocols' required");
  for (const auto& p : j.at("protocols"))
    e.protocols.push_back(protocol_from_name(p.get<std::string>()));

  if (j.contains("ris_designs"))
    for (const auto& d : j.at("ris_designs"))
      e.designs.push_back(ris_design_from_name(d.get<std::string>()));
  else if (j.contains("ris_design"))
    e.designs.push_back(ris_design_from_name(j.at("ris_design").get<std::string>()));
  else
    e.designs.push_back(RisDesign::random);

  if (j.contains("outputs"))
    e.outputs = j.at("outputs").get<std::vector<std::string>>();
  else
    e.outputs = {"sinr_det", "netrate_det", "overhead"};
  for (const auto& o : e.outputs)
    if (!kOutputs.count(o))
      throw std::invalid_argument("experiment: unknown output '" + o + "'");

  if (j.contains("mc")) {
    const auto& m = j.at("mc");
    e.mc.n_samples = m.value("n_samples", e.mc.n_samples);
    e.mc.seed = m.value("seed", e.mc.seed);
    e.mc.threads = m.value("threads", e.mc.threads);
  }
  if (j.contains("pga")) {
    const auto& p = j.at("pga");
    e.pga.epsilon = p.value("epsilon", e.pga.epsilon);
    e.pga.mu0 = p.value("mu0", e.pga.mu0);
    e.pga.backtrack_beta = p.value("backtrack_beta", e.pga.backtrack_beta);
    e.pga.backtrack_c = p.value("backtrack_c", e.pga.backtrack_c);
    e.pga.fd_step = p.value("fd_step", e.pga.fd_step);
    e.pga.max_iters = p.value("max_iters", e.pga.max_iters);
    e.pga.random_init = p.value("random_init", e.pga.random_init);
  }
  if (j.contains("ga")) {
    const auto& g = j.at("ga");
    e.ga.population_size = g.value("population_size", e.ga.population_size);
    e.ga.generations = g.value("generations", e.ga.generations);
    e.ga.crossover_rate = g.value("crossover_rate", e.ga.crossover_rate);
    e.ga.mutation_rate = g.value("mutation_rate", e.ga.mutation_rate);
    e.ga.mutation_sigma = g.value("mutation_sigma", e.ga.mutation_sigma);
    e.ga.elitism_count = g.value("elitism_count", e.ga.elitism_count);
    e.ga.tournament_size = g.value("tournament_size", e.ga.tournament_size);
  }
  e.out_path = j.value("out", std::string());
  e.format = j.value("format", std::string("csv"));
  if (e.format != "csv" && e.format != "json")
    throw std::invalid_argument("experiment: format must be csv or json");
  return e;
}

Experiment load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_experiment: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return experiment_from_json(j);
}

Experiment preset_experiment(const std::string& name) {
  nlohmann::json j;
  if (name == "fig2") {
    j = {{"scenario", {{"config", {{"M", 60}, {"N", 60}, {"L", 20}, {"K", 20}}}}},
         {"sweep", {{"axis", "P_max"},
                    {"values", {2, 4, 6, 8, 10, 12, 14, 16, 18, 20}}}},
         {"protocols", {"perfect", "dft", "de"}},
         {"ris_designs", {"random", "scsi_pga"}},
         {"outputs", {"sinr_det", "sinr_mc"}},
         {"pga", {{"random_init", true}}},
         {"mc", {{"n_samples", 2000}}}};
  } else if (name == "fig3") {
    j = {{"scenario", {{"config", {{"M", 60}, {"N", 60}, {"L", 20}, {"K", 20}}}}},
         {"sweep", {{"axis", "P_max"},
                    {"values", {2, 4, 6, 8, 10, 12, 14, 16, 18, 20}}}},
         {"protocols", {"perfect", "dft", "de"}},
         {"ris_designs", {"random", "scsi_pga", "none"}},
         {"outputs", {"netrate_det", "netrate_mc", "overhead"}},
         {"pga", {{"random_init", true}}},
         {"mc", {{"n_samples", 2000}}}};
  } else if (name == "fig4") {
    j = {{"scenario", {{"config", {{"M", 60}, {"N", 100}, {"L", 20}, {"K", 20}}}}},
         {"sweep", {{"axis", "N"}, {"values", {20, 60, 80, 100, 160, 240, 320}}}},
         {"protocols", {"dft", "de"}},
         {"ris_designs", {"scsi_pga"}},
         {"outputs", {"netrate_det", "netrate_mc", "overhead"}},
         {"pga", {{"random_init", true}}},
         {"mc", {{"n_samples", 2000}}}};
  } else {
    throw std::invalid_argument("unknown preset '" + name + "' (fig2|fig3|fig4)");
  }
  return experiment_from_json(j);
}

const std::vector<std::string>& ResultTable::columns() {
  static const std::vector<std::string> cols = {
      "sweep_axis",
      "sweep_value",
      "protocol",
      "design",
      "seed",
      "mc_samples",
      "sinr_det_mean_linear",
      "sinr_mc_mean_linear",
      "sinr_mc_stderr_mean",
      "netrate_det_bps_hz",
      "netrate_mc_bps_hz",
      "netrate_inst_bps_hz",
      "overhead_symbols",
      "error"};
  return cols;
}

namespace {

bool wants(const Experiment& e, const std::string& o) {
  return std::find(e.outputs.begin(), e.outputs.end(), o) != e.outputs.end();
}

// Average instantaneous net sum-rate over realizations at fixed phases
// (dft/perfect: the instantaneous SINR needs the error covariance).
double mean_inst_net_rate(const Scenario& sc, const ChannelStatics& cs,
                          const PhaseConfig& theta, Protocol protocol,
                          int n_samples, std::uint64_t seed) {
  if (n_samples < 1)
    throw std::invalid_argument("netrate_inst: needs n_samples >= 1");
  double acc = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const std::uint64_t si = seed_mix(seed, static_cast<std::uint64_t>(i));
    const ChannelRealization r = sample_channels(sc, cs, theta, si);
    const EstimateSet est = estimate(sc, cs, theta, r, protocol, si);
    acc += net_rate(instantaneous_sinr(est, sc), est.S_real, sc).sum_rate;
  }
  return acc / n_samples;
}

// Average over realizations of (GA phase design per realization, then its
// instantaneous net sum-rate): I-CSI benchmark.
double mean_ga_icsi_net_rate(const Scenario& sc, const ChannelStatics& cs,
                             Protocol protocol, const GaOptions& ga,
                             int n_samples, std::uint64_t seed) {
  if (protocol != Protocol::dft)
    throw std::invalid_argument("icsi_ga design requires the dft protocol");
  if (n_samples < 1)
    throw std::invalid_argument("icsi_ga: needs n_samples >= 1");
  const PhaseConfig train_theta = PhaseConfig::all_ones(sc.L() * sc.N());
  double acc = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const std::uint64_t si = seed_mix(seed, static_cast<std::uint64_t>(i));
    const ChannelRealization r = sample_channels(sc, cs, train_theta, si);
    const EstimateSet est = estimate(sc, cs, train_theta, r, protocol, si);
    GaOptions g = ga;
    g.seed = si;
    const auto [phi, trace] = ga_optimize_icsi(sc, cs, est, g);
    EstimateSet work = est;
    for (int k = 0; k < sc.K(); ++k)
      work.h_hat.col(k) = assemble_dft_estimate(cs, phi, est.links[k], k);
    acc += net_rate(instantaneous_sinr(work, sc), est.S_real, sc).sum_rate;
  }
  return acc / n_samples;
}

}  // namespace

ResultTable run_experiment(const Experiment& exp) {
  ResultTable table;
  const std::string axis_key = exp.sweep_axis == "P_max" ? "P_max_w" : exp.sweep_axis;

  for (std::size_t vi = 0; vi < exp.sweep_values.size(); ++vi) {
    const double value = exp.sweep_values[vi];

    for (std::size_t di = 0; di < exp.designs.size(); ++di) {
      const RisDesign design = exp.designs[di];
      for (std::size_t pi = 0; pi < exp.protocols.size(); ++pi) {
        const Protocol protocol = exp.protocols[pi];

        ResultRow row;
        row.sweep_axis = exp.sweep_axis;
        row.sweep_value = value;
        row.protocol = protocol_name(protocol);
        row.design = ris_design_name(design);
        row.seed = seed_mix(exp.mc.seed, kRowSeedTag + vi,
                            pi * 16 + di);
        row.mc_samples = exp.mc.n_samples;
        try {
          nlohmann::json tpl = exp.scenario_template;
          if (exp.sweep_axis == "P_max")
            tpl["config"][axis_key] = value;
          else
            tpl["config"][axis_key] = static_cast<int>(value);
          if (design == RisDesign::none) tpl["config"]["L"] = 0;
          const Scenario sc = scenario_from_json(tpl);
          const ChannelStatics cs = build_channel_statics(sc);
          const int LN = sc.L() * sc.N();

          if (design == RisDesign::icsi_ga) {
            if (wants(exp, "netrate_inst"))
              row.netrate_inst_bps_hz = mean_ga_icsi_net_rate(
                  sc, cs, protocol, exp.ga, exp.mc.n_samples, row.seed);
            if (wants(exp, "overhead"))
              row.overhead_symbols =
                  subphases_real(sc, protocol) * sc.cfg.tau_S;
            table.rows.push_back(std::move(row));
            continue;
          }

          PhaseConfig phi;
          switch (design) {
            case RisDesign::random:
              phi = PhaseConfig::random(LN, seed_mix(row.seed, kRandomPhaseTag));
              break;
            case RisDesign::scsi_pga: {
              PgaOptions po = exp.pga;
              po.seed = row.seed;
              phi = pga_optimize(sc, cs, protocol, po).first;
              break;
            }
            case RisDesign::none:
              phi = PhaseConfig::all_ones(0);
              break;
            default:
              break;
          }

          if (wants(exp, "sinr_det") || wants(exp, "netrate_det")) {
            const DetStats st = build_det_stats(sc, cs, protocol);
            if (wants(exp, "sinr_det"))
              row.sinr_det_mean_linear = sinr_det(st, phi).mean();
            if (wants(exp, "netrate_det"))
              row.netrate_det_bps_hz = net_sum_rate_det(st, phi);
          }
          if ((wants(exp, "sinr_mc") || wants(exp, "netrate_mc")) &&
              exp.mc.n_samples > 0) {
            McConfig mc = exp.mc;
            mc.protocol = protocol;
            mc.seed = row.seed;
            const McRateResult r = ergodic_net_sum_rate_mc(sc, cs, phi, mc);
            if (wants(exp, "sinr_mc")) {
              row.sinr_mc_mean_linear = r.sinr.gamma.mean();
              row.sinr_mc_stderr_mean = r.sinr.stderr_jk.mean();
            }
            if (wants(exp, "netrate_mc")) row.netrate_mc_bps_hz = r.sum_rate;
          }
          if (wants(exp, "netrate_inst") && exp.mc.n_samples > 0)
            row.netrate_inst_bps_hz = mean_inst_net_rate(
                sc, cs, phi, protocol, exp.mc.n_samples, row.seed);
          if (wants(exp, "overhead"))
            row.overhead_symbols = subphases_real(sc, protocol) * sc.cfg.tau_S;
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

namespace {

std::string opt_cell(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string();
}

}  // namespace

std::string results_to_string(const ResultTable& table, const std::string& format) {
  if (format == "csv") {
    std::string out;
    const auto& cols = ResultTable::columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out += ',';
      out += cols[i];
    }
    out += '\n';
    for (const auto& r : table.rows) {
      out += csv_escape(r.sweep_axis);
      out += ',' + fmt_double(r.sweep_value);
      out += ',' + r.protocol;
      out += ',' + r.design;
      out += ',' + std::to_string(r.seed);
      out += ',' + std::to_string(r.mc_samples);
      out += ',' + opt_cell(r.sinr_det_mean_linear);
      out += ',' + opt_cell(r.sinr_mc_mean_linear);
      out += ',' + opt_cell(r.sinr_mc_stderr_mean);
      out += ',' + opt_cell(r.netrate_det_bps_hz);
      out += ',' + opt_cell(r.netrate_mc_bps_hz);
      out += ',' + opt_cell(r.netrate_inst_bps_hz);
      out += ',' + opt_cell(r.overhead_symbols);
      out += ',' + csv_escape(r.error);
      out += '\n';
    }
    return out;
  }
  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : table.rows) {
      nlohmann::json o;
      o["sweep_axis"] = r.sweep_axis;
      o["sweep_value"] = r.sweep_value;
      o["protocol"] = r.protocol;
      o["design"] = r.design;
      o["seed"] = r.seed;
      o["mc_samples"] = r.mc_samples;
      auto put = [&o](const char* key, const std::optional<double>& v) {
        if (v) o[key] = *v;
      };
      put("sinr_det_mean_linear", r.sinr_det_mean_linear);
      put("sinr_mc_mean_linear", r.sinr_mc_mean_linear);
      put("sinr_mc_stderr_mean", r.sinr_mc_stderr_mean);
      put("netrate_det_bps_hz", r.netrate_det_bps_hz);
      put("netrate_mc_bps_hz", r.netrate_mc_bps_hz);
      put("netrate_inst_bps_hz", r.netrate_inst_bps_hz);
      put("overhead_symbols", r.overhead_symbols);
      if (!r.error.empty()) o["error"] = r.error;
      arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
  }
  throw std::invalid_argument("results_to_string: format must be csv or json");
}

void emit_results(const ResultTable& table, const std::string& path,
                  const std::string& format) {
  const std::string body = results_to_string(table, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_results: cannot open " + path);
  out << body;
  if (!out) throw std::runtime_error("emit_results: write failed for " + path);
}

}  // namespace risim
