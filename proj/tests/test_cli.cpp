#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dooc/commands.hpp"

using namespace dooc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dooc_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CONSENSUS_SIM) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_json(const std::string& name, const Json& j) {
  const fs::path p = scratch(name) / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

}  // namespace

TEST(Analyze, Example1Passes) {
  std::ostringstream out;
  Json j;
  EXPECT_EQ(cmd_analyze(preset("example1"), out, &j), kExitOk);
  EXPECT_NE(out.str().find("lambda2 = 1, lambda4 = 2"), std::string::npos) << out.str();
  EXPECT_NEAR(j["graph"]["lambda2"].get<double>(), 1.0, 1e-9);
  EXPECT_NEAR(j["graph"]["lambda_max"].get<double>(), 2.0, 1e-9);
}

TEST(Analyze, StarGraphFailsBalance) {
  auto cfg = preset("example1");
  cfg.graph = Digraph(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
  std::ostringstream out;
  Json j;
  EXPECT_EQ(cmd_analyze(cfg, out, &j), kExitDomainFailure);
  EXPECT_FALSE(j["graph"]["weight_balanced"].get<bool>());
}

TEST(Analyze, OverclaimedConvexityFails) {
  auto cfg = preset("example2");
  cfg.costs[3].l_lower = 5.0;
  cfg.costs[3].l_upper = 6.0;
  std::ostringstream out;
  Json j;
  EXPECT_EQ(cmd_analyze(cfg, out, &j), kExitDomainFailure);
  EXPECT_FALSE(j["costs"][3]["pass"].get<bool>());
  EXPECT_TRUE(j["costs"][0]["pass"].get<bool>());
}

TEST(Tune, Example1ReferenceGainsPass) {
  std::ostringstream out;
  EXPECT_EQ(cmd_tune(preset("example1"), out), kExitOk) << out.str();
  EXPECT_NE(out.str().find("certificate: PASS"), std::string::npos);
}

TEST(Tune, FormulaModeReportsGeneratorGains) {
  const auto cfg = parse_config(Json::parse(R"({"preset": "example2",
      "gains": {"tuning": "formula"}})"));
  EXPECT_EQ(cfg.gains.epsilon, 6.0);
  EXPECT_EQ(cfg.gains.gamma, 10.0);
  std::ostringstream out;
  Json j;
  cmd_tune(cfg, out, &j);
  EXPECT_NE(out.str().find("alpha = 9, beta = 1944"), std::string::npos) << out.str();
}

TEST(Tune, GammaCapBelowPassingValueIsDomainFailure) {
  const auto cfg = parse_config(Json::parse(R"({"preset": "example2",
      "gains": {"gamma": "auto", "gamma_max": 1}})"));
  std::ostringstream out;
  EXPECT_EQ(cmd_tune(cfg, out), kExitDomainFailure);
  EXPECT_NE(out.str().find("gamma"), std::string::npos);
}

TEST(SimulateCommand, Example1WritesArtifactsAndSettles) {
  const auto dir = scratch("sim1");
  std::ostringstream out;
  EXPECT_EQ(cmd_simulate(preset("example1"), dir, out), kExitOk) << out.str();
  for (const char* f : {"trajectory.csv", "report.json", "report.txt", "config.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const Json rep = Json::parse(slurp(dir / "report.json"));
  EXPECT_TRUE(rep["settled"].get<bool>());
  EXPECT_NEAR(rep["y_star"].get<double>(), 4.0, 1e-9);
}

TEST(SimulateCommand, Example2SettlesInBothPhases) {
  const auto dir = scratch("sim2");
  std::ostringstream out;
  EXPECT_EQ(cmd_simulate(preset("example2"), dir, out), kExitOk) << out.str();
  const Json rep = Json::parse(slurp(dir / "report.json"));
  ASSERT_EQ(rep["phases"].size(), 2u);
  for (const auto& ph : rep["phases"]) EXPECT_TRUE(ph["settled"].get<bool>());
  EXPECT_NEAR(rep["y_star"].get<double>(), 3.24, 0.01);
}

TEST(SimulateCommand, TinyHorizonIsNotSettled) {
  auto cfg = preset("example1");
  cfg.sim.t_final = 0.001;
  std::ostringstream out;
  EXPECT_EQ(cmd_simulate(cfg, scratch("tiny"), out), kExitDomainFailure);
}

TEST(Report, MatchesInlineReport) {
  const auto dir = scratch("report");
  std::ostringstream out;
  ASSERT_EQ(cmd_simulate(preset("example1"), dir, out), kExitOk);
  const Json inline_rep = Json::parse(slurp(dir / "report.json"));

  std::ostringstream text;
  Json j;
  EXPECT_EQ(cmd_report(dir / "trajectory.csv", {}, text, &j), kExitOk);
  EXPECT_EQ(j["settle_time"], inline_rep["settle_time"]);
  EXPECT_EQ(j["settled"], inline_rep["settled"]);

  ReportOptions opts;
  opts.y_star = 4.0;
  Json k;
  EXPECT_EQ(cmd_report(dir / "trajectory.csv", opts, text, &k), kExitOk);
  EXPECT_EQ(k["settle_time"], inline_rep["settle_time"]);
  EXPECT_EQ(k["max_abs_u"], inline_rep["max_abs_u"]);
}

TEST(Report, TruncatedFileNamesLine) {
  const auto dir = scratch("trunc");
  std::ofstream(dir / "trajectory.csv") << "t,y1,u1,z1\n0,1,2,3\n0.1,1\n";
  std::ostringstream out;
  ReportOptions opts;
  opts.y_star = 1.0;
  try {
    cmd_report(dir / "trajectory.csv", opts, out);
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Config, RoundTripThroughJson) {
  const auto cfg = preset("example2");
  Json original = to_json(cfg);
  const auto back = parse_config(original);
  original.erase("preset_source");
  EXPECT_EQ(to_json(back).dump(), original.dump());
}

TEST(Config, MalformedInputThrows) {
  EXPECT_THROW(parse_config(Json::parse(R"({"preset": "example3"})")), Error);
  EXPECT_THROW(parse_config(Json::parse(R"({"preset": "example1", "sim": {"h": -1}})")),
               Error);
  EXPECT_THROW(parse_config(Json::parse(R"({"graph": {"n": 2}})")), Error);
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run_cli("analyze --preset example1"), 0);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("analyze --preset example1 --config x.json"), 2);
  EXPECT_EQ(run_cli("analyze --config /nonexistent/cfg.json"), 2);
  const auto bad = write_json("bad", Json::parse(R"({"preset": "example1",
      "graph": {"n": 4, "edges": [{"from": 1, "to": 2, "w": 1}]}})"));
  EXPECT_EQ(run_cli("analyze --config " + bad.string()), 1);
  const auto dir = scratch("bin_sim");
  EXPECT_EQ(run_cli("simulate --preset example1 --t-final 0.001 --out " + dir.string()), 1);
  EXPECT_EQ(run_cli("report " + (dir / "trajectory.csv").string()), 1);
}

TEST(Binary, SeededSimulationsAreBitwiseIdentical) {
  const auto a = scratch("seed_a"), b = scratch("seed_b");
  run_cli("simulate --preset example2 --seed 7 --t-final 5 --out " + a.string());
  run_cli("simulate --preset example2 --seed 7 --t-final 5 --out " + b.string());
  const std::string ca = slurp(a / "trajectory.csv");
  EXPECT_FALSE(ca.empty());
  EXPECT_EQ(ca, slurp(b / "trajectory.csv"));
}
