// SPDX-License-Identifier: Apache-2.0
//
// risim: distributed-RIS multi-user MISO downlink simulator.
#pragma once

#include "json.hpp"
#include <optional>
#include <string>
#include <vector>

#include "risim/montecarlo.hpp"
#include "risim/optimize.hpp"

namespace risim {

enum class RisDesign { random, scsi_pga, icsi_ga, none };

const char* ris_design_name(RisDesign d);
RisDesign ris_design_from_name(const std::string& name);

// A sweep over one scenario parameter, evaluated for every protocol x
// RIS-design combination. JSON schema:
//   {
//     "scenario": { "config": {...}, "geometry": {...} },   // see scenario.hpp
//     "sweep":    { "axis": "P_max|N|M|K|L", "values": [.. ] },
//     "protocols": ["perfect", "dft", "de"],
//     "ris_designs": ["random", "scsi_pga", "icsi_ga", "none"],  // or "ris_design": "..."
//     "outputs": ["sinr_det","sinr_mc","netrate_det","netrate_mc",
//                 "netrate_inst","overhead"],
//     "mc": { "n_samples": 2000, "seed": 1, "threads": 1 },
//     "pga": { "max_iters": 500, "epsilon": 1e-6, "fd_step": 1e-5 },   // optional
//     "ga":  { "population_size": 50, "generations": 100 },            // optional
//     "out": "results.csv", "format": "csv|json"                       // optional
//   }
struct Experiment {
  nlohmann::json scenario_template;  // consumed by scenario_from_json per point
  std::string sweep_axis;
  std::vector<double> sweep_values;
  std::vector<Protocol> protocols;
  std::vector<RisDesign> designs;
  std::vector<std::string> outputs;
  McConfig mc;
  PgaOptions pga;
  GaOptions ga;
  std::string out_path;          // empty -> stdout
  std::string format = "csv";
};

Experiment experiment_from_json(const nlohmann::json& j);
Experiment load_experiment(const std::string& path);
// fig2: SINR vs P_max; fig3: net sum-rate vs P_max incl. no-RIS baselines;
// fig4: net sum-rate and training overhead vs N.
Experiment preset_experiment(const std::string& name);

struct ResultRow {
  std::string sweep_axis;
  double sweep_value = 0.0;
  std::string protocol;
  std::string design;
  std::uint64_t seed = 0;
  int mc_samples = 0;
  std::optional<double> sinr_det_mean_linear;
  std::optional<double> sinr_mc_mean_linear;
  std::optional<double> sinr_mc_stderr_mean;
  std::optional<double> netrate_det_bps_hz;
  std::optional<double> netrate_mc_bps_hz;
  std::optional<double> netrate_inst_bps_hz;
  std::optional<double> overhead_symbols;
  std::string error;  // empty on success; failed points keep the run going
};

struct ResultTable {
  static const std::vector<std::string>& columns();  // stable documented order
  std::vector<ResultRow> rows;
};

ResultTable run_experiment(const Experiment& exp);

std::string results_to_string(const ResultTable& table, const std::string& format);
void emit_results(const ResultTable& table, const std::string& path,
                  const std::string& format);

}  // namespace risim
