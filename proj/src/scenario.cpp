#include "dooc/scenario.hpp"

#include <cmath>
#include <sstream>

namespace dooc {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error("config: " + where + ": " + what);
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) fail(where, std::string("missing '") + key + "'");
  return obj.at(key);
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

VectorXd vector_of(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], where);
  return v;
}

// Row-major nested arrays.
MatrixXd matrix_of(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) fail(where, "expected a nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = vector_of(j[static_cast<size_t>(r)], where);
    if (row.size() != cols) fail(where, "ragged matrix");
    m.row(r) = row.transpose();
  }
  return m;
}

Json to_json(const VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(VectorXd(m.row(r).transpose())));
  return a;
}

std::optional<double> auto_or_number(const Json& obj, const char* key,
                                     std::optional<double> fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& j = obj.at(key);
  if (j.is_string() && j.get<std::string>() == "auto") return std::nullopt;
  return number(j, std::string("gains.") + key);
}

Digraph parse_graph(const Json& j) {
  const int n = static_cast<int>(number(require(j, "n", "graph"), "graph.n"));
  if (n < 1) fail("graph.n", "must be >= 1");
  Digraph g(n);
  if (j.contains("edges")) {
    for (const auto& e : j.at("edges")) {
      const int from = static_cast<int>(number(require(e, "from", "graph.edges"), "graph.edges.from"));
      const int to = static_cast<int>(number(require(e, "to", "graph.edges"), "graph.edges.to"));
      const double w = e.contains("w") ? number(e.at("w"), "graph.edges.w") : 1.0;
      try {
        g.add_edge(from - 1, to - 1, w);
      } catch (const Error& err) {
        fail("graph.edges", err.what());
      }
    }
  }
  return g;
}

AffinePlant parse_plant(const Json& j) {
  AffinePlant p;
  p.A0 = matrix_of(require(j, "A0", "plant"), "plant.A0");
  p.B0 = vector_of(require(j, "B0", "plant"), "plant.B0");
  p.C0 = vector_of(require(j, "C0", "plant"), "plant.C0").transpose();
  const Eigen::Index n = p.A0.rows();
  if (j.contains("box")) {
    for (const auto& iv : j.at("box")) {
      const auto v = vector_of(iv, "plant.box");
      if (v.size() != 2 || v(0) > v(1)) fail("plant.box", "intervals are [lo, hi]");
      p.box.push_back({v(0), v(1)});
    }
  }
  if (p.box.empty()) p.box.push_back({0.0, 0.0});
  const size_t nw = p.box.size();
  p.dA.assign(nw, MatrixXd::Zero(n, n));
  p.dB.assign(nw, VectorXd::Zero(n));
  p.dC.assign(nw, RowVectorXd::Zero(n));
  if (j.contains("deviations")) {
    size_t next = 0;
    for (const auto& d : j.at("deviations")) {
      const size_t k = d.contains("param")
                           ? static_cast<size_t>(number(d.at("param"), "plant.deviations.param")) - 1
                           : next;
      if (k >= nw) fail("plant.deviations", "parameter index out of range of box");
      if (d.contains("A")) p.dA[k] = matrix_of(d.at("A"), "plant.deviations.A");
      if (d.contains("B")) p.dB[k] = vector_of(d.at("B"), "plant.deviations.B");
      if (d.contains("C")) p.dC[k] = vector_of(d.at("C"), "plant.deviations.C").transpose();
      next = k + 1;
    }
  }
  if (j.contains("disturbance")) p.disturbance = vector_of(j.at("disturbance"), "plant.disturbance");
  try {
    p.validate();
  } catch (const Error& e) {
    fail("plant", e.what());
  }
  return p;
}

CostFunction parse_cost(const Json& j) {
  const std::string where = "costs";
  const auto fam = require(j, "family", where).get<std::string>();
  auto get = [&](const char* key, double def) {
    return j.contains(key) ? number(j.at(key), where + "." + key) : def;
  };
  CostFunction f;
  if (fam == "quadratic") {
    const double c = get("c", 1.0);
    f = CostFunction::quadratic(c, get("target", 0.0));
  } else if (fam == "scaled_log_quadratic") {
    f.family = cost::ScaledLogQuadratic{get("a", 1.0), get("b", 2.0), get("target", 0.0)};
  } else if (fam == "sqrt_ratio_quadratic") {
    f.family = cost::SqrtRatioQuadratic{get("a", 1.0)};
  } else if (fam == "log_sum_exp_quadratic") {
    f.family = cost::LogSumExpQuadratic{get("s", 1.0)};
  } else {
    fail(where, "unknown family '" + fam + "'");
  }
  f.l_lower = get("l_lower", f.l_lower);
  f.l_upper = get("l_upper", f.l_upper);
  try {
    f.validate();
  } catch (const Error& e) {
    fail(where, e.what());
  }
  return f;
}

Json cost_to_json(const CostFunction& f) {
  Json j;
  j["family"] = f.family_name();
  std::visit(
      [&](const auto& q) {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, cost::Quadratic>) {
          j["c"] = q.c;
          j["target"] = q.target;
        } else if constexpr (std::is_same_v<T, cost::ScaledLogQuadratic>) {
          j["a"] = q.a;
          j["b"] = q.b;
          j["target"] = q.target;
        } else if constexpr (std::is_same_v<T, cost::SqrtRatioQuadratic>) {
          j["a"] = q.a;
        } else {
          j["s"] = q.s;
        }
      },
      f.family);
  j["l_lower"] = f.l_lower;
  j["l_upper"] = f.l_upper;
  return j;
}

GainSpec parse_gains(const Json& j) {
  GainSpec g;
  if (j.contains("k")) {
    const Json& k = j.at("k");
    if (!(k.is_string() && k.get<std::string>() == "auto")) g.k = vector_of(k, "gains.k");
  }
  if (j.contains("lambda0")) g.lambda0 = number(j.at("lambda0"), "gains.lambda0");
  g.alpha = auto_or_number(j, "alpha", std::nullopt);
  g.beta = auto_or_number(j, "beta", std::nullopt);
  g.epsilon = auto_or_number(j, "epsilon", std::nullopt);
  g.gamma = auto_or_number(j, "gamma", std::nullopt);
  if (j.contains("tuning")) g.tuning = j.at("tuning").get<std::string>();
  if (g.tuning != "manual" && g.tuning != "formula") {
    fail("gains.tuning", "expected \"manual\" or \"formula\"");
  }
  if (j.contains("gamma_max")) g.gamma_max = number(j.at("gamma_max"), "gains.gamma_max");
  return g;
}

Json optional_to_json(const std::optional<double>& v) {
  return v ? Json(*v) : Json("auto");
}

void parse_sim(const Json& j, ScenarioConfig& cfg) {
  SimConfig& s = cfg.sim;
  if (j.contains("h")) s.h = number(j.at("h"), "sim.h");
  if (j.contains("t_final")) s.t_final = number(j.at("t_final"), "sim.t_final");
  if (j.contains("record_stride")) s.record_stride = j.at("record_stride").get<int>();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("randomize")) s.randomize = j.at("randomize").get<bool>();
  if (j.contains("mode")) {
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "output_feedback") cfg.mode = ControlMode::OutputFeedback;
    else if (mode == "partial_state") cfg.mode = ControlMode::PartialState;
    else fail("sim.mode", "expected \"output_feedback\" or \"partial_state\"");
  }
  if (j.contains("schedule")) {
    s.schedule.clear();
    for (const auto& e : j.at("schedule")) {
      s.schedule.push_back({number(require(e, "t", "sim.schedule"), "sim.schedule.t"),
                            vector_of(require(e, "w", "sim.schedule"), "sim.schedule.w")});
    }
  }
  if (j.contains("initial")) {
    const Json& in = j.at("initial");
    // Per-agent columns: x and chi are given one row per agent.
    if (in.contains("x")) s.initial.x = matrix_of(in.at("x"), "sim.initial.x").transpose();
    if (in.contains("chi")) s.initial.chi = matrix_of(in.at("chi"), "sim.initial.chi").transpose();
    if (in.contains("xi0")) s.initial.xi0 = vector_of(in.at("xi0"), "sim.initial.xi0");
    if (in.contains("z")) s.initial.z = vector_of(in.at("z"), "sim.initial.z");
    if (in.contains("v")) s.initial.v = vector_of(in.at("v"), "sim.initial.v");
  }
}

}  // namespace

ScenarioConfig parse_config(const Json& doc_in) {
  if (!doc_in.is_object()) throw Error("config: top level must be an object");
  Json doc = doc_in;
  std::optional<std::string> preset_name;
  if (doc.contains("preset")) {
    preset_name = doc.at("preset").get<std::string>();
    double g = 9.8, m0 = 1.0;
    if (doc.contains("constants")) {
      const Json& c = doc.at("constants");
      if (c.contains("g")) g = number(c.at("g"), "constants.g");
      if (c.contains("M0")) m0 = number(c.at("M0"), "constants.M0");
    }
    Json base = preset_json(*preset_name, g, m0);
    Json patch = doc;
    patch.erase("preset");
    patch.erase("constants");
    base.merge_patch(patch);
    doc = std::move(base);
  }

  ScenarioConfig cfg;
  cfg.preset = preset_name;
  try {
    cfg.graph = parse_graph(require(doc, "graph", "top level"));
    cfg.plant = parse_plant(require(doc, "plant", "top level"));
    const Json& costs = require(doc, "costs", "top level");
    if (!costs.is_array()) fail("costs", "expected an array");
    for (const auto& c : costs) cfg.costs.push_back(parse_cost(c));
    if (static_cast<int>(cfg.costs.size()) != cfg.graph.size()) {
      fail("costs", "need one cost per agent (" + std::to_string(cfg.graph.size()) + ")");
    }
    if (doc.contains("gains")) cfg.gains = parse_gains(doc.at("gains"));
    if (doc.contains("z0")) {
      cfg.z0 = vector_of(doc.at("z0"), "z0");
      if (cfg.z0.size() != cfg.graph.size()) fail("z0", "wrong length");
    }
    if (doc.contains("sim")) parse_sim(doc.at("sim"), cfg);
    if (doc.contains("analysis")) {
      const Json& a = doc.at("analysis");
      if (a.contains("cost_interval")) {
        const auto v = vector_of(a.at("cost_interval"), "analysis.cost_interval");
        if (v.size() != 2) fail("analysis.cost_interval", "expected [lo, hi]");
        cfg.analysis.cost_lo = v(0);
        cfg.analysis.cost_hi = v(1);
      }
      if (a.contains("cost_samples")) cfg.analysis.cost_samples = a.at("cost_samples").get<int>();
      if (a.contains("grid_per_axis")) cfg.analysis.grid_per_axis = a.at("grid_per_axis").get<int>();
      if (a.contains("balance_tol")) cfg.analysis.balance_tol = number(a.at("balance_tol"), "analysis.balance_tol");
    }
    if (doc.contains("tol")) cfg.tol = number(doc.at("tol"), "tol");
    cfg.sim.validate(cfg.plant.n_w());
  } catch (const Json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  return cfg;
}

Json to_json(const ScenarioConfig& cfg) {
  Json j;
  if (cfg.preset) j["preset_source"] = *cfg.preset;
  Json edges = Json::array();
  for (const auto& e : cfg.graph.edges()) {
    edges.push_back({{"from", e.from + 1}, {"to", e.to + 1}, {"w", e.weight}});
  }
  j["graph"] = {{"n", cfg.graph.size()}, {"edges", edges}};

  Json plant;
  plant["A0"] = to_json(cfg.plant.A0);
  plant["B0"] = to_json(cfg.plant.B0);
  plant["C0"] = to_json(VectorXd(cfg.plant.C0.transpose()));
  Json devs = Json::array();
  for (int k = 0; k < cfg.plant.n_w(); ++k) {
    devs.push_back({{"param", k + 1},
                    {"A", to_json(cfg.plant.dA[k])},
                    {"B", to_json(cfg.plant.dB[k])},
                    {"C", to_json(VectorXd(cfg.plant.dC[k].transpose()))}});
  }
  plant["deviations"] = devs;
  Json box = Json::array();
  for (const auto& iv : cfg.plant.box) box.push_back({iv.lo, iv.hi});
  plant["box"] = box;
  if (cfg.plant.disturbance.size()) plant["disturbance"] = to_json(cfg.plant.disturbance);
  j["plant"] = plant;

  Json costs = Json::array();
  for (const auto& c : cfg.costs) costs.push_back(cost_to_json(c));
  j["costs"] = costs;

  Json gains;
  gains["k"] = cfg.gains.k ? to_json(*cfg.gains.k) : Json("auto");
  gains["lambda0"] = cfg.gains.lambda0;
  gains["alpha"] = optional_to_json(cfg.gains.alpha);
  gains["beta"] = optional_to_json(cfg.gains.beta);
  gains["epsilon"] = optional_to_json(cfg.gains.epsilon);
  gains["gamma"] = optional_to_json(cfg.gains.gamma);
  gains["tuning"] = cfg.gains.tuning;
  gains["gamma_max"] = cfg.gains.gamma_max;
  j["gains"] = gains;
  if (cfg.z0.size()) j["z0"] = to_json(cfg.z0);

  Json sim;
  sim["h"] = cfg.sim.h;
  sim["t_final"] = cfg.sim.t_final;
  sim["record_stride"] = cfg.sim.record_stride;
  sim["mode"] = cfg.mode == ControlMode::OutputFeedback ? "output_feedback" : "partial_state";
  sim["randomize"] = cfg.sim.randomize;
  sim["seed"] = cfg.sim.seed;
  Json sched = Json::array();
  for (const auto& e : cfg.sim.schedule) sched.push_back({{"t", e.t}, {"w", to_json(e.w)}});
  sim["schedule"] = sched;
  Json initial = Json::object();
  if (cfg.sim.initial.x) initial["x"] = to_json(MatrixXd(cfg.sim.initial.x->transpose()));
  if (cfg.sim.initial.chi) initial["chi"] = to_json(MatrixXd(cfg.sim.initial.chi->transpose()));
  if (cfg.sim.initial.xi0) initial["xi0"] = to_json(*cfg.sim.initial.xi0);
  if (cfg.sim.initial.z) initial["z"] = to_json(*cfg.sim.initial.z);
  if (cfg.sim.initial.v) initial["v"] = to_json(*cfg.sim.initial.v);
  if (!initial.empty()) sim["initial"] = initial;
  j["sim"] = sim;

  j["analysis"] = {{"cost_interval", {cfg.analysis.cost_lo, cfg.analysis.cost_hi}},
                   {"cost_samples", cfg.analysis.cost_samples},
                   {"grid_per_axis", cfg.analysis.grid_per_axis},
                   {"balance_tol", cfg.analysis.balance_tol}};
  j["tol"] = cfg.tol;
  return j;
}

Json preset_json(const std::string& name, double g, double m0) {
  const Json cycle = {{"n", 4},
                      {"edges",
                       {{{"from", 1}, {"to", 2}, {"w", 1.0}},
                        {{"from", 2}, {"to", 3}, {"w", 1.0}},
                        {{"from", 3}, {"to", 4}, {"w", 1.0}},
                        {{"from", 4}, {"to", 1}, {"w", 1.0}}}}};
  const Json example_gains = {{"k", {1.0, 2.0}}, {"lambda0", 1.0}, {"alpha", 1.0},
                            {"beta", 15.0},    {"epsilon", 6.0}, {"gamma", 10.0},
                            {"tuning", "manual"}, {"gamma_max", 64.0}};
  Json j;
  if (name == "example1") {
    if (!(m0 > 0.0)) throw Error("preset example1: M0 must be positive");
    // Vertical VTOL dynamics q'' = (1 + w) T / M0 - g, w = M0/M - 1.
    j["graph"] = cycle;
    j["plant"] = {{"A0", {{0.0, 1.0}, {0.0, 0.0}}},
                  {"B0", {0.0, 1.0 / m0}},
                  {"C0", {1.0, 0.0}},
                  {"deviations", {{{"param", 1}, {"B", {0.0, 1.0 / m0}}}}},
                  {"box", {{-0.5, 1.0}}},
                  {"disturbance", {0.0, -g}}};
    Json costs = Json::array();
    Json z0 = Json::array();
    for (int i = 1; i <= 4; ++i) {
      costs.push_back({{"family", "quadratic"}, {"c", 2.0}, {"target", 2.0 * i - 1.0}});
      z0.push_back(2.0 * i - 1.0);
    }
    j["costs"] = costs;
    j["gains"] = example_gains;
    j["z0"] = z0;
    j["sim"] = {{"h", 1e-3},
                {"t_final", 40.0},
                {"record_stride", 10},
                {"mode", "output_feedback"},
                {"schedule", {{{"t", 0.0}, {"w", {0.0}}}}}};
  } else if (name == "example2") {
    j["graph"] = cycle;
    j["plant"] = {
        {"A0", {{-1.0, 1.0, 0.0}, {-1.0, 0.0, 1.0}, {1.0, 0.0, 1.0}}},
        {"B0", {0.0, 0.0, 1.0}},
        {"C0", {0.0, 1.0, 0.0}},
        {"deviations",
         {{{"param", 1}, {"A", {{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}}},
          {{"param", 2}, {"A", {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}}},
          {{"param", 3},
           {"A", {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}},
           {"B", {0.0, 0.0, 1.0}}},
          {{"param", 4}, {"C", {0.0, 1.0, 0.0}}}}},
        {"box", {{-0.5, 0.5}, {-0.5, 0.5}, {-0.5, 0.5}, {-0.5, 0.5}}}};
    j["costs"] = {
        {{"family", "quadratic"}, {"c", 1.0}, {"target", 8.0}, {"l_lower", 0.5}, {"l_upper", 1.5}},
        {{"family", "scaled_log_quadratic"}, {"a", 160.0}, {"b", 2.0}, {"target", 5.0},
         {"l_lower", 0.5}, {"l_upper", 1.5}},
        {{"family", "sqrt_ratio_quadratic"}, {"a", 40.0}, {"l_lower", 0.5}, {"l_upper", 1.5}},
        {{"family", "log_sum_exp_quadratic"}, {"s", 0.05}, {"l_lower", 0.5}, {"l_upper", 1.5}}};
    j["gains"] = example_gains;
    j["sim"] = {{"h", 1e-3},
                {"t_final", 50.0},
                {"record_stride", 10},
                {"mode", "output_feedback"},
                {"schedule",
                 {{{"t", 0.0}, {"w", {0.4, 0.3, -0.2, -0.4}}},
                  {{"t", 25.0}, {"w", {0.1, -0.2, -0.3, 0.2}}}}}};
  } else {
    throw Error("unknown preset '" + name + "' (expected example1 or example2)");
  }
  j["tol"] = 0.05;
  return j;
}

ScenarioConfig preset(const std::string& name) {
  return parse_config(Json{{"preset", name}});
}

std::vector<VectorXd> tuning_grid(const AffinePlant& plant) {
  return grid::corners_and_center(plant.box);
}

ResolvedScenario resolve(const ScenarioConfig& cfg) {
  ResolvedScenario out;
  Scenario& s = out.scenario;
  s.graph = cfg.graph;
  s.plant = cfg.plant;
  s.costs = cfg.costs;
  s.mode = cfg.mode;
  s.z0 = cfg.z0;

  const auto nominal = materialize(cfg.plant, VectorXd::Zero(cfg.plant.n_w()));
  const int m = relative_degree(nominal.A, nominal.B, nominal.C).m;
  s.gains.m = m;
  s.gains.lambda0 = cfg.gains.lambda0;
  if (cfg.gains.k) {
    s.gains.k = *cfg.gains.k;
  } else {
    s.gains.k = stabilizer_gains(m, cfg.gains.lambda0);
    out.notes.push_back("k from (s + lambda0)^m");
  }

  const bool formula = cfg.gains.tuning == "formula";
  if (formula || !cfg.gains.alpha || !cfg.gains.beta) {
    const auto spec = laplacian(cfg.graph);
    if (!is_strongly_connected(cfg.graph) ||
        !is_weight_balanced(cfg.graph, cfg.analysis.balance_tol)) {
      throw Error("tuning: alpha/beta formula needs a strongly connected, "
                  "weight-balanced graph");
    }
    const auto ab = tune_alpha_beta(ensemble_l_lower(cfg.costs),
                                    ensemble_l_upper(cfg.costs), spec.lambda2(),
                                    spec.lambda_max());
    s.generator.alpha = (formula || !cfg.gains.alpha) ? ab.alpha : *cfg.gains.alpha;
    s.generator.beta = (formula || !cfg.gains.beta) ? ab.beta : *cfg.gains.beta;
    out.notes.push_back("alpha/beta from the generator convergence formula");
  } else {
    s.generator.alpha = *cfg.gains.alpha;
    s.generator.beta = *cfg.gains.beta;
  }

  const auto samples = tuning_grid(cfg.plant);
  if (cfg.gains.epsilon) {
    s.gains.epsilon = *cfg.gains.epsilon;
  } else {
    out.eps = epsilon_bound(cfg.plant, s.gains.k, samples);
    s.gains.epsilon = out.eps->eps_bound;
    out.notes.push_back("epsilon from the Lyapunov gain floor");
  }

  if (cfg.gains.gamma) {
    s.gains.gamma = *cfg.gains.gamma;
  } else {
    s.gains.gamma = gamma_search(cfg.plant, cfg.costs, cfg.graph, s.gains,
                                 s.generator, samples, cfg.gains.gamma_max);
    out.notes.push_back("gamma from the eigenvalue-certificate doubling search");
  }
  s.validate();
  return out;
}

}  // namespace dooc
