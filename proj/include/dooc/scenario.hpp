#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dooc/sim.hpp"
#include "dooc/tuning.hpp"

namespace dooc {

using Json = nlohmann::ordered_json;

/// Gain section of a config. Unset optionals mean "auto".
struct GainSpec {
  std::optional<VectorXd> k;
  double lambda0 = 1.0;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> epsilon;
  std::optional<double> gamma;
  /// "manual": unset alpha/beta fall back to the convergence formula.
  /// "formula": alpha/beta always come from the formula.
  std::string tuning = "manual";
  double gamma_max = 64.0;
};

struct AnalysisSpec {
  double cost_lo = -20.0;
  double cost_hi = 20.0;
  int cost_samples = 200;
  int grid_per_axis = 3;
  double balance_tol = kBalanceTolerance;
};

/// A fully expanded scenario file: graph, plant, costs, gains, simulation
/// and analysis settings.
struct ScenarioConfig {
  std::optional<std::string> preset;
  Digraph graph{1};
  AffinePlant plant;
  CostEnsemble costs;
  GainSpec gains;
  ControlMode mode = ControlMode::OutputFeedback;
  VectorXd z0;
  SimConfig sim;
  AnalysisSpec analysis;
  double tol = 0.05;
};

/// Parses a config document. A "preset" key expands the built-in scenario
/// first and the rest of the document is applied to it as a JSON merge patch
/// (objects merge key by key, arrays and scalars replace, null deletes).
/// Throws Error on malformed input.
ScenarioConfig parse_config(const Json& doc);
Json to_json(const ScenarioConfig& cfg);

/// Built-in scenarios: "example1" (VTOL vertical dynamics with gravity,
/// average consensus) and "example2" (third-order uncertain agents, four
/// costs, parameter switch at t = 25 s).
Json preset_json(const std::string& name, double g = 9.8, double m0 = 1.0);
ScenarioConfig preset(const std::string& name);

struct ResolvedScenario {
  Scenario scenario;
  std::vector<std::string> notes;  // how each auto gain was obtained
  std::optional<EpsilonBound> eps;
};

/// Samples used by tuning: box corners plus the center.
std::vector<VectorXd> tuning_grid(const AffinePlant& plant);

/// Fills every "auto" gain and builds the runnable scenario.
ResolvedScenario resolve(const ScenarioConfig& cfg);

}  // namespace dooc
