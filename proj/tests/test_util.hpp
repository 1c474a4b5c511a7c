// Shared helpers for the unit tests.
#pragma once

#include "json.hpp"
#include "risim/scenario.hpp"

// Small scenario with explicit dimensions and the default arc geometry.
// extra holds additional "config" keys (bare schema from scenario_from_json).
inline risim::Scenario toy_scenario(int M, int N1, int N2, int L, int K,
                                    nlohmann::json extra = nlohmann::json::object()) {
  nlohmann::json cfg = {{"M", M}, {"N1", N1}, {"N2", N2}, {"L", L}, {"K", K}};
  cfg.update(extra);
  return risim::scenario_from_json(nlohmann::json{{"config", cfg}});
}
