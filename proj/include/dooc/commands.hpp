#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "dooc/scenario.hpp"

namespace dooc {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitDomainFailure = 1,  // assumption, certificate or convergence failure
  kExitUsage = 2,          // malformed config or arguments
};

/// Network, cost and plant assumption checks. Writes a text report to `out`
/// and, when `json` is given, a structured copy.
int cmd_analyze(const ScenarioConfig& cfg, std::ostream& out,
                Json* json = nullptr);

/// Resolves "auto" gains and certifies the linearized closed loop.
int cmd_tune(const ScenarioConfig& cfg, std::ostream& out, Json* json = nullptr);

/// Runs the closed loop and writes trajectory.csv, report.json, report.txt
/// and config.json (the resolved scenario) into `out_dir`.
int cmd_simulate(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                 std::ostream& out);

struct ReportOptions {
  std::optional<double> y_star;
  std::optional<double> tol;
  /// Scenario used for y* (cost oracle), switch times and tol. Defaults to a
  /// config.json next to the CSV when present.
  std::optional<ScenarioConfig> sidecar;
};

int cmd_report(const std::filesystem::path& csv, const ReportOptions& opts,
               std::ostream& out, Json* json = nullptr);

std::string format_report(const ConvergenceReport& rep);
Json report_to_json(const ConvergenceReport& rep);

}  // namespace dooc
