#include "dooc/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dooc {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string vec_str(const VectorXd& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v(i));
  return s + ")";
}

Json vec_json(const VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

std::vector<double> switch_times(const SimConfig& sim) {
  std::vector<double> out;
  for (size_t k = 1; k < sim.schedule.size(); ++k) out.push_back(sim.schedule[k].t);
  return out;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
}

}  // namespace

int cmd_analyze(const ScenarioConfig& cfg, std::ostream& out, Json* json) {
  Json j;
  bool ok = true;

  const bool connected = is_strongly_connected(cfg.graph);
  const bool balanced = is_weight_balanced(cfg.graph, cfg.analysis.balance_tol);
  const auto spec = laplacian(cfg.graph);
  out << "graph: " << cfg.graph.size() << " agents\n"
      << "  strongly connected: " << verdict(connected) << "\n"
      << "  weight balanced:    " << verdict(balanced) << "\n"
      << "  Sym(L) eigenvalues: " << vec_str(spec.eigenvalues) << "\n";
  if (cfg.graph.size() > 1) {
    out << "  lambda2 = " << fmt(spec.lambda2()) << ", lambda" << cfg.graph.size()
        << " = " << fmt(spec.lambda_max()) << "\n";
  }
  j["graph"] = {{"strongly_connected", connected},
                {"weight_balanced", balanced},
                {"eigenvalues", vec_json(spec.eigenvalues)},
                {"lambda2", spec.lambda2()},
                {"lambda_max", spec.lambda_max()}};
  ok = ok && connected && balanced;

  out << "costs: convexity bounds on [" << fmt(cfg.analysis.cost_lo) << ", "
      << fmt(cfg.analysis.cost_hi) << "], " << cfg.analysis.cost_samples
      << " samples\n";
  Json jc = Json::array();
  for (size_t i = 0; i < cfg.costs.size(); ++i) {
    const auto& f = cfg.costs[i];
    const bool pass = verify_assumption1(f, cfg.analysis.cost_lo, cfg.analysis.cost_hi,
                                         cfg.analysis.cost_samples);
    out << "  agent " << i + 1 << " (" << f.family_name() << ", l_lower="
        << fmt(f.l_lower) << ", l_upper=" << fmt(f.l_upper) << "): " << verdict(pass)
        << "\n";
    jc.push_back({{"agent", i + 1}, {"family", f.family_name()}, {"pass", pass}});
    ok = ok && pass;
  }
  j["costs"] = jc;
  try {
    const double y_star = global_minimizer(cfg.costs);
    out << "  global minimizer y* = " << fmt(y_star, 10) << "\n";
    j["y_star"] = y_star;
  } catch (const Error& e) {
    out << "  global minimizer: " << e.what() << "\n";
    ok = false;
  }

  const auto samples = grid::uniform(cfg.plant.box, cfg.analysis.grid_per_axis);
  const auto a3 = check_assumption3(cfg.plant, samples);
  out << "plant: n = " << cfg.plant.n() << ", relative degree m = " << a3.nominal_m
      << ", " << samples.size() << " parameter samples\n"
      << "  relative degree / b1 > 0 / minimum phase: " << verdict(a3.passed()) << "\n";
  Json viol = Json::array();
  for (const auto& v : a3.violators()) {
    out << "  violator w = " << vec_str(v.w) << ": " << v.reason << "\n";
    viol.push_back({{"w", vec_json(v.w)}, {"reason", v.reason}});
  }
  j["plant"] = {{"m", a3.nominal_m},
                {"samples", samples.size()},
                {"pass", a3.passed()},
                {"violators", viol}};
  ok = ok && a3.passed();

  out << "assumptions: " << verdict(ok) << "\n";
  j["pass"] = ok;
  if (json) *json = j;
  return ok ? kExitOk : kExitDomainFailure;
}

int cmd_tune(const ScenarioConfig& cfg, std::ostream& out, Json* json) {
  std::ostringstream sink;
  if (cmd_analyze(cfg, sink) != kExitOk) {
    out << sink.str() << "tune: assumption checks failed\n";
    return kExitDomainFailure;
  }
  Json j;
  ResolvedScenario rs;
  try {
    rs = resolve(cfg);
  } catch (const TuningError& e) {
    out << "tune: " << e.what() << "\n";
    j["error"] = e.what();
    if (json) *json = j;
    return kExitDomainFailure;
  }
  const Scenario& s = rs.scenario;
  out << "gains:\n"
      << "  k = " << vec_str(s.gains.k) << " (lambda0 = " << fmt(s.gains.lambda0) << ")\n"
      << "  alpha = " << fmt(s.generator.alpha) << ", beta = " << fmt(s.generator.beta) << "\n"
      << "  epsilon = " << fmt(s.gains.epsilon) << ", gamma = " << fmt(s.gains.gamma) << "\n"
      << "  observer l = " << vec_str(s.gains.observer_l()) << "\n";
  for (const auto& n : rs.notes) out << "  note: " << n << "\n";

  const auto spec = laplacian(cfg.graph);
  const auto formula = tune_alpha_beta(ensemble_l_lower(cfg.costs),
                                       ensemble_l_upper(cfg.costs), spec.lambda2(),
                                       spec.lambda_max());
  out << "  formula reference: alpha >= " << fmt(formula.alpha) << ", beta >= "
      << fmt(formula.beta) << "\n";

  const auto samples = tuning_grid(cfg.plant);
  const auto cert = certify_closed_loop(cfg.plant, cfg.costs, cfg.graph, s.gains,
                                        s.generator, samples, s.mode);
  out << "certificate over " << samples.size() << " parameter samples:\n";
  Json margins = Json::array();
  for (const auto& m : cert.margins) {
    out << "  w = " << vec_str(m.w) << "  margin = " << fmt(m.margin)
        << (m.margin < -kMarginTolerance ? "" : "  <-- violator") << "\n";
    margins.push_back({{"w", vec_json(m.w)}, {"margin", m.margin},
                       {"structural_zero", m.structural_zero}});
  }
  out << "  worst margin = " << fmt(cert.worst_margin) << "\n";
  if (cert.note.empty()) {
    out << "  eps_hat = " << fmt(cert.eps_hat) << ", epsilon floor = "
        << fmt(cert.eps_bound) << (s.gains.epsilon >= cert.eps_bound ? "" : " (epsilon below floor)")
        << "\n";
  } else {
    out << "  epsilon floor unavailable: " << cert.note << "\n";
  }
  out << "certificate: " << verdict(cert.passed()) << "\n";

  j["gains"] = {{"m", s.gains.m},
                {"k", vec_json(s.gains.k)},
                {"lambda0", s.gains.lambda0},
                {"alpha", s.generator.alpha},
                {"beta", s.generator.beta},
                {"epsilon", s.gains.epsilon},
                {"gamma", s.gains.gamma},
                {"observer_l", vec_json(s.gains.observer_l())}};
  j["formula"] = {{"alpha", formula.alpha}, {"beta", formula.beta}};
  j["certificate"] = {{"pass", cert.passed()},
                      {"worst_margin", cert.worst_margin},
                      {"eps_hat", cert.eps_hat},
                      {"eps_bound", cert.eps_bound},
                      {"gamma_used", cert.gamma_used},
                      {"margins", margins}};
  if (!cert.note.empty()) j["certificate"]["note"] = cert.note;
  if (json) *json = j;
  return cert.passed() ? kExitOk : kExitDomainFailure;
}

std::string format_report(const ConvergenceReport& rep) {
  std::ostringstream o;
  o << "y* = " << fmt(rep.y_star, 10) << ", tol = " << fmt(rep.tol) << "\n"
    << "final max |y_i - y*| = " << fmt(rep.final_error) << "\n";
  if (rep.settled) o << "settled at t = " << fmt(rep.settle_time) << "\n";
  else o << "not settled\n";
  o << "max |u_i| = " << fmt(rep.max_abs_u) << "\n"
    << "final u = " << vec_str(rep.final_u) << "\n";
  for (size_t p = 0; p < rep.phases.size(); ++p) {
    const auto& ph = rep.phases[p];
    o << "phase " << p + 1 << " [" << fmt(ph.t_start) << ", " << fmt(ph.t_end)
      << "]: final error " << fmt(ph.final_error) << ", ";
    if (ph.settled) o << "settled at t = " << fmt(ph.settle_time);
    else o << "not settled";
    o << ", max |u| " << fmt(ph.max_abs_u) << "\n";
  }
  return o.str();
}

Json report_to_json(const ConvergenceReport& rep) {
  Json phases = Json::array();
  for (const auto& ph : rep.phases) {
    phases.push_back({{"t_start", ph.t_start},
                      {"t_end", ph.t_end},
                      {"final_error", ph.final_error},
                      {"max_error", ph.max_error},
                      {"settled", ph.settled},
                      {"settle_time", ph.settled ? Json(ph.settle_time) : Json(nullptr)},
                      {"max_abs_u", ph.max_abs_u}});
  }
  return {{"y_star", rep.y_star},
          {"tol", rep.tol},
          {"final_error", rep.final_error},
          {"settled", rep.settled},
          {"settle_time", rep.settled ? Json(rep.settle_time) : Json(nullptr)},
          {"max_abs_u", rep.max_abs_u},
          {"final_u", vec_json(rep.final_u)},
          {"phases", phases}};
}

int cmd_simulate(const ScenarioConfig& cfg, const fs::path& out_dir,
                 std::ostream& out) {
  std::ostringstream sink;
  if (cmd_analyze(cfg, sink) != kExitOk) {
    out << sink.str() << "simulate: assumption checks failed\n";
    return kExitDomainFailure;
  }
  ResolvedScenario rs;
  try {
    rs = resolve(cfg);
  } catch (const TuningError& e) {
    out << "simulate: " << e.what() << "\n";
    return kExitDomainFailure;
  }
  fs::create_directories(out_dir);

  ScenarioConfig resolved = cfg;
  resolved.gains.k = rs.scenario.gains.k;
  resolved.gains.alpha = rs.scenario.generator.alpha;
  resolved.gains.beta = rs.scenario.generator.beta;
  resolved.gains.epsilon = rs.scenario.gains.epsilon;
  resolved.gains.gamma = rs.scenario.gains.gamma;
  resolved.gains.tuning = "manual";
  write_file(out_dir / "config.json", to_json(resolved).dump(2) + "\n");

  const double y_star = global_minimizer(cfg.costs);
  Trajectory traj;
  std::string diagnostic;
  try {
    traj = simulate(rs.scenario, cfg.sim);
  } catch (const DivergenceError& e) {
    traj = e.partial();
    diagnostic = e.what();
    diagnostic += "; last valid state " + vec_str(e.last_valid_state());
  }
  write_file(out_dir / "trajectory.csv", trajectory_csv(traj));

  ConvergenceReport rep;
  Json j;
  if (traj.size() > 0) {
    rep = convergence_report(traj, y_star, cfg.tol, switch_times(cfg.sim));
    j = report_to_json(rep);
  }
  if (!diagnostic.empty()) {
    rep.settled = false;
    j["settled"] = false;
    j["diverged"] = true;
    j["diagnostic"] = diagnostic;
  }
  std::string text = traj.size() ? format_report(rep) : std::string();
  if (!diagnostic.empty()) text += "DIVERGED: " + diagnostic + "\n";
  write_file(out_dir / "report.json", j.dump(2) + "\n");
  write_file(out_dir / "report.txt", text);
  out << text;
  return rep.settled && diagnostic.empty() ? kExitOk : kExitDomainFailure;
}

int cmd_report(const fs::path& csv, const ReportOptions& opts, std::ostream& out,
               Json* json) {
  std::ifstream f(csv, std::ios::binary);
  if (!f) throw Error("report: cannot open " + csv.string());
  std::stringstream buf;
  buf << f.rdbuf();
  const Trajectory traj = parse_trajectory_csv(buf.str());

  std::optional<ScenarioConfig> sidecar = opts.sidecar;
  const fs::path side = csv.parent_path() / "config.json";
  if (!sidecar && fs::exists(side)) {
    std::ifstream sf(side);
    try {
      sidecar = parse_config(Json::parse(sf));
    } catch (const Json::exception& e) {
      throw Error(std::string("report: bad sidecar config: ") + e.what());
    }
  }
  double y_star = 0.0;
  if (opts.y_star) y_star = *opts.y_star;
  else if (sidecar) y_star = global_minimizer(sidecar->costs);
  else throw Error("report: no y* (pass --y-star or provide config.json)");
  const double tol = opts.tol ? *opts.tol : sidecar ? sidecar->tol : 0.05;
  const auto rep = convergence_report(traj, y_star, tol,
                                      sidecar ? switch_times(sidecar->sim)
                                              : std::vector<double>{});
  out << format_report(rep);
  if (json) *json = report_to_json(rep);
  return rep.settled ? kExitOk : kExitDomainFailure;
}

}  // namespace dooc
