// consensus-sim: analysis, tuning and simulation of distributed optimal
// output consensus for uncertain linear agents.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dooc/commands.hpp"

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<double> t_final;
  bool dump = false;
};

void add_common(CLI::App* cmd, Common& c) {
  auto* cfg = cmd->add_option("--config", c.config, "Scenario JSON file");
  auto* pre = cmd->add_option("--preset", c.preset, "Built-in scenario")
                  ->check(CLI::IsMember({"example1", "example2"}));
  cfg->excludes(pre);
  cmd->add_option("--tol", c.tol, "Settling tolerance on max |y_i - y*|");
  cmd->add_option("--seed", c.seed, "Randomize initial conditions with this seed");
  cmd->add_option("--t-final", c.t_final, "Simulation horizon in seconds");
  cmd->add_flag("--dump-config", c.dump, "Print the expanded config and exit");
}

dooc::ScenarioConfig load(const Common& c) {
  dooc::ScenarioConfig cfg;
  if (!c.preset.empty()) {
    cfg = dooc::preset(c.preset);
  } else if (!c.config.empty()) {
    std::ifstream f(c.config);
    if (!f) throw dooc::Error("cannot open config " + c.config);
    dooc::Json doc;
    try {
      doc = dooc::Json::parse(f);
    } catch (const dooc::Json::exception& e) {
      throw dooc::Error(std::string("config: ") + e.what());
    }
    cfg = dooc::parse_config(doc);
  } else {
    throw dooc::Error("one of --config or --preset is required");
  }
  if (c.tol) cfg.tol = *c.tol;
  if (c.seed) {
    cfg.sim.seed = *c.seed;
    cfg.sim.randomize = true;
  }
  if (c.t_final) cfg.sim.t_final = *c.t_final;
  cfg.sim.validate(cfg.plant.n_w());
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed optimal output consensus: analyze, tune, simulate, report"};
  app.require_subcommand(1);

  Common analyze_opts, tune_opts, sim_opts;
  auto* analyze = app.add_subcommand("analyze", "Check graph, cost and plant assumptions");
  add_common(analyze, analyze_opts);
  bool analyze_json = false;
  analyze->add_flag("--json", analyze_json, "Print the JSON report instead of text");

  auto* tune = app.add_subcommand("tune", "Resolve auto gains and certify the closed loop");
  add_common(tune, tune_opts);
  bool tune_json = false;
  tune->add_flag("--json", tune_json, "Print the JSON report instead of text");

  auto* simulate = app.add_subcommand("simulate", "Simulate the closed loop");
  add_common(simulate, sim_opts);
  std::string out_dir = "out";
  simulate->add_option("--out", out_dir, "Output directory");

  auto* report = app.add_subcommand("report", "Recompute the convergence report from a CSV");
  std::string csv;
  std::optional<double> y_star, report_tol;
  std::string report_config;
  bool report_json = false;
  report->add_option("csv", csv, "trajectory.csv written by simulate")->required();
  report->add_option("--y-star", y_star, "Optimum to measure against");
  report->add_option("--tol", report_tol, "Settling tolerance");
  report->add_option("--config", report_config, "Scenario config (default: config.json next to the CSV)");
  report->add_flag("--json", report_json, "Print the JSON report instead of text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dooc::kExitUsage;
  }

  try {
    auto run = [](const Common& c, auto&& body) -> int {
      const auto cfg = load(c);
      if (c.dump) {
        std::cout << dooc::to_json(cfg).dump(2) << "\n";
        return dooc::kExitOk;
      }
      return body(cfg);
    };
    if (*analyze) {
      return run(analyze_opts, [&](const dooc::ScenarioConfig& cfg) {
        dooc::Json j;
        std::ostringstream text;
        const int rc = dooc::cmd_analyze(cfg, text, &j);
        std::cout << (analyze_json ? j.dump(2) + "\n" : text.str());
        return rc;
      });
    }
    if (*tune) {
      return run(tune_opts, [&](const dooc::ScenarioConfig& cfg) {
        dooc::Json j;
        std::ostringstream text;
        const int rc = dooc::cmd_tune(cfg, text, &j);
        std::cout << (tune_json ? j.dump(2) + "\n" : text.str());
        return rc;
      });
    }
    if (*simulate) {
      return run(sim_opts, [&](const dooc::ScenarioConfig& cfg) {
        return dooc::cmd_simulate(cfg, out_dir, std::cout);
      });
    }
    if (*report) {
      dooc::ReportOptions opts;
      opts.y_star = y_star;
      opts.tol = report_tol;
      if (!report_config.empty()) {
        Common c;
        c.config = report_config;
        opts.sidecar = load(c);
      }
      dooc::Json j;
      std::ostringstream text;
      const int rc = dooc::cmd_report(csv, opts, text, &j);
      std::cout << (report_json ? j.dump(2) + "\n" : text.str());
      return rc;
    }
  } catch (const dooc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dooc::kExitUsage;
  }
  return dooc::kExitUsage;
}
