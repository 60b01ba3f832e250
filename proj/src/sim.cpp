#include "dooc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

namespace dooc {

void Scenario::validate() const {
  const int n_agents = graph.size();
  plant.validate();
  if (static_cast<int>(costs.size()) != n_agents) {
    throw Error("scenario: " + std::to_string(costs.size()) + " costs for " +
                std::to_string(n_agents) + " agents");
  }
  for (const auto& c : costs) c.validate();
  gains.validate();
  generator.validate();
  if (z0.size() != 0 && z0.size() != n_agents) {
    throw Error("scenario: z0 has wrong length");
  }
  const auto nominal = materialize(plant, VectorXd::Zero(plant.n_w()));
  const auto rd = relative_degree(nominal.A, nominal.B, nominal.C);
  if (rd.m != gains.m) {
    throw Error("scenario: gains built for m = " + std::to_string(gains.m) +
                " but the plant has relative degree " + std::to_string(rd.m));
  }
}

void SimConfig::validate(int n_w) const {
  if (!(h > 0.0)) throw Error("sim: step size must be positive");
  if (!(t_final > 0.0)) throw Error("sim: t_final must be positive");
  if (record_stride < 1) throw Error("sim: record_stride must be >= 1");
  for (size_t k = 0; k < schedule.size(); ++k) {
    if (k == 0 && schedule[k].t != 0.0) {
      throw Error("sim: schedule must start at t = 0");
    }
    if (k > 0 && !(schedule[k].t > schedule[k - 1].t)) {
      throw Error("sim: schedule times must be strictly increasing");
    }
    if (schedule[k].w.size() != n_w) {
      throw Error("sim: schedule entry " + std::to_string(k + 1) +
                  " has wrong parameter length");
    }
  }
}

StateLayout StateLayout::of(const Scenario& s) {
  const int chi = (s.mode == ControlMode::OutputFeedback && s.gains.m >= 2)
                      ? s.gains.m
                      : 0;
  return StateLayout(s.agents(), s.plant.n(), chi);
}

VectorXd closed_loop_rhs(const VectorXd& state, const Scenario& s,
                         const PlantMatrices& pm, VectorXd* u_out) {
  const StateLayout lay = StateLayout::of(s);
  const int n = lay.n();
  const int agents = lay.agents();
  if (state.size() != lay.size()) throw Error("closed_loop_rhs: bad state size");

  VectorXd dx(lay.size());
  GeneratorState gs{state.segment(lay.z(), agents), state.segment(lay.v(), agents)};
  const auto rates = generator_rhs(gs, s.costs, s.graph, s.generator);
  dx.segment(lay.z(), agents) = rates.z_dot;
  dx.segment(lay.v(), agents) = rates.v_dot;

  if (u_out) u_out->resize(agents);
  for (int i = 0; i < agents; ++i) {
    const auto x = state.segment(lay.x(i), n);
    const double y = pm.C.dot(x);
    const double z = gs.z(i);
    const double xi0 = state(lay.xi0(i));
    double u = 0.0;
    if (s.mode == ControlMode::PartialState) {
      u = partial_state_control(s.gains, xi0, x, z, pm.A, pm.C);
    } else {
      ControllerState c{xi0, state.segment(lay.chi(i), lay.chi_dim())};
      u = control_output(s.gains, c, y, z);
      if (lay.chi_dim() > 0) {
        dx.segment(lay.chi(i), lay.chi_dim()) = observer_rhs(s.gains, c.chi, y);
      }
    }
    dx.segment(lay.x(i), n) = pm.A * x + pm.B * u + pm.disturbance;
    dx(lay.xi0(i)) = integral_rhs(y, z);
    if (u_out) (*u_out)(i) = u;
  }
  return dx;
}

VectorXd rk4_step(const Rhs& f, const VectorXd& state, double t, double h) {
  if (!(h > 0.0)) throw Error("rk4_step: step must be positive");
  const VectorXd k1 = f(t, state);
  const VectorXd k2 = f(t + 0.5 * h, state + 0.5 * h * k1);
  const VectorXd k3 = f(t + 0.5 * h, state + 0.5 * h * k2);
  const VectorXd k4 = f(t + h, state + h * k3);
  for (const VectorXd* k : {&k1, &k2, &k3, &k4}) {
    if (!k->allFinite()) throw Error("rk4_step: non-finite stage");
  }
  return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

VectorXd initial_state(const Scenario& s, const SimConfig& cfg) {
  const StateLayout lay = StateLayout::of(s);
  const int n = lay.n();
  const int agents = lay.agents();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto draw = [&](Eigen::Index rows, Eigen::Index cols) {
    MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = unif(rng);
    }
    return m;
  };

  const MatrixXd x = cfg.initial.x ? *cfg.initial.x
                     : cfg.randomize ? draw(n, agents)
                                     : MatrixXd::Zero(n, agents);
  VectorXd z = cfg.initial.z ? *cfg.initial.z
               : cfg.randomize ? VectorXd(draw(agents, 1))
               : s.z0.size() ? s.z0
                             : VectorXd::Zero(agents);
  const VectorXd v = cfg.initial.v ? *cfg.initial.v
                     : cfg.randomize ? VectorXd(draw(agents, 1))
                                     : VectorXd::Zero(agents);
  const VectorXd xi0 = cfg.initial.xi0 ? *cfg.initial.xi0 : VectorXd::Zero(agents);
  if (x.rows() != n || x.cols() != agents || z.size() != agents ||
      v.size() != agents || xi0.size() != agents) {
    throw Error("initial_state: override has wrong dimensions");
  }

  const VectorXd w0 = cfg.schedule.empty() ? VectorXd::Zero(s.plant.n_w())
                                           : cfg.schedule.front().w;
  const auto pm = materialize(s.plant, w0);
  VectorXd state = VectorXd::Zero(lay.size());
  for (int i = 0; i < agents; ++i) {
    state.segment(lay.x(i), n) = x.col(i);
    state(lay.xi0(i)) = xi0(i);
    if (lay.chi_dim() > 0) {
      if (cfg.initial.chi) {
        if (cfg.initial.chi->rows() != lay.chi_dim() ||
            cfg.initial.chi->cols() != agents) {
          throw Error("initial_state: chi override has wrong dimensions");
        }
        state.segment(lay.chi(i), lay.chi_dim()) = cfg.initial.chi->col(i);
      } else {
        state.segment(lay.chi(i), lay.chi_dim()) =
            initial_observer_state(s.gains.m, pm.C.dot(x.col(i)));
      }
    }
  }
  state.segment(lay.z(), agents) = z;
  state.segment(lay.v(), agents) = v;
  return state;
}

namespace {

void record(Trajectory& traj, const StateLayout& lay, const Scenario& s,
            const PlantMatrices& pm, const VectorXd& state, double t) {
  const int n = lay.n();
  const int agents = lay.agents();
  VectorXd u;
  closed_loop_rhs(state, s, pm, &u);
  VectorXd y(agents), xi0(agents);
  MatrixXd x(n, agents), chi(lay.chi_dim(), agents);
  for (int i = 0; i < agents; ++i) {
    x.col(i) = state.segment(lay.x(i), n);
    y(i) = pm.C.dot(x.col(i));
    xi0(i) = state(lay.xi0(i));
    if (lay.chi_dim()) chi.col(i) = state.segment(lay.chi(i), lay.chi_dim());
  }
  traj.times.push_back(t);
  traj.y.push_back(y);
  traj.u.push_back(u);
  traj.z.push_back(state.segment(lay.z(), agents));
  traj.v.push_back(state.segment(lay.v(), agents));
  traj.xi0.push_back(xi0);
  traj.x.push_back(x);
  traj.chi.push_back(chi);
}

}  // namespace

Trajectory simulate(const Scenario& s, const SimConfig& cfg_in) {
  s.validate();
  SimConfig cfg = cfg_in;
  if (cfg.schedule.empty()) {
    cfg.schedule.push_back({0.0, VectorXd::Zero(s.plant.n_w())});
  }
  cfg.validate(s.plant.n_w());

  const StateLayout lay = StateLayout::of(s);
  Trajectory traj;
  traj.agents = lay.agents();
  VectorXd state = initial_state(s, cfg);

  std::vector<PlantMatrices> phase_pm;
  for (const auto& e : cfg.schedule) phase_pm.push_back(materialize(s.plant, e.w));

  record(traj, lay, s, phase_pm.front(), state, 0.0);
  long long step = 0;
  for (size_t k = 0; k < cfg.schedule.size(); ++k) {
    const double t_start = cfg.schedule[k].t;
    if (t_start >= cfg.t_final) break;
    const double t_end = (k + 1 < cfg.schedule.size())
                             ? std::min(cfg.schedule[k + 1].t, cfg.t_final)
                             : cfg.t_final;
    const PlantMatrices& pm = phase_pm[k];
    const Rhs rhs = [&](double, const VectorXd& x) {
      return closed_loop_rhs(x, s, pm);
    };
    const auto steps = static_cast<long long>(
        std::ceil((t_end - t_start) / cfg.h - 1e-9));
    for (long long j = 0; j < steps; ++j) {
      const double t = t_start + static_cast<double>(j) * cfg.h;
      const bool last = (j + 1 == steps);
      const double h = last ? t_end - t : cfg.h;
      VectorXd next;
      try {
        next = rk4_step(rhs, state, t, h);
      } catch (const Error& e) {
        throw DivergenceError(std::string("simulate: ") + e.what() + " at t = " +
                                  std::to_string(t),
                              std::move(traj), state, t);
      }
      const double t_next = last ? t_end : t + h;
      if (!next.allFinite() ||
          next.cwiseAbs().maxCoeff() > kDivergenceThreshold) {
        throw DivergenceError(
            "simulate: state exceeded 1e12 at t = " + std::to_string(t_next),
            std::move(traj), state, t);
      }
      state = std::move(next);
      ++step;
      if (step % cfg.record_stride == 0 || last) {
        const bool at_switch = last && k + 1 < cfg.schedule.size();
        record(traj, lay, s, at_switch ? phase_pm[k + 1] : pm, state, t_next);
      }
    }
  }
  return traj;
}

ConvergenceReport convergence_report(const Trajectory& traj, double y_star,
                                     double tol,
                                     const std::vector<double>& switch_times) {
  if (traj.size() == 0) throw Error("convergence_report: empty trajectory");
  ConvergenceReport rep;
  rep.y_star = y_star;
  rep.tol = tol;
  const size_t count = traj.size();
  std::vector<double> err(count);
  for (size_t k = 0; k < count; ++k) {
    err[k] = (traj.y[k].array() - y_star).abs().maxCoeff();
    rep.max_abs_u = std::max(rep.max_abs_u, traj.u[k].cwiseAbs().maxCoeff());
  }
  rep.final_error = err.back();
  rep.final_u = traj.u.back();

  auto settle = [&](size_t begin, size_t end, bool& settled, double& when) {
    settled = false;
    if (begin >= end || err[end - 1] > tol) return;
    size_t k = end;
    while (k > begin && err[k - 1] <= tol) --k;
    settled = true;
    when = traj.times[k];
  };
  bool overall = false;
  settle(0, count, overall, rep.settle_time);

  std::vector<double> bounds{traj.times.front()};
  for (double t : switch_times) {
    if (t > traj.times.front() && t < traj.times.back()) bounds.push_back(t);
  }
  bounds.push_back(traj.times.back());
  size_t begin = 0;
  rep.settled = overall;
  for (size_t p = 0; p + 1 < bounds.size(); ++p) {
    const bool last_phase = p + 2 == bounds.size();
    size_t end = begin;
    while (end < count &&
           (traj.times[end] < bounds[p + 1] || (last_phase && end < count))) {
      ++end;
    }
    PhaseStats ph;
    ph.t_start = bounds[p];
    ph.t_end = bounds[p + 1];
    for (size_t k = begin; k < end; ++k) {
      ph.max_error = std::max(ph.max_error, err[k]);
      ph.max_abs_u = std::max(ph.max_abs_u, traj.u[k].cwiseAbs().maxCoeff());
    }
    ph.final_error = end > begin ? err[end - 1] : std::numeric_limits<double>::quiet_NaN();
    settle(begin, end, ph.settled, ph.settle_time);
    rep.settled = rep.settled && ph.settled;
    rep.phases.push_back(ph);
    begin = end;
  }
  return rep;
}

std::string trajectory_csv(const Trajectory& traj) {
  const int agents = traj.agents;
  std::string out = "t";
  for (const char* prefix : {"y", "u", "z"}) {
    for (int i = 1; i <= agents; ++i) out += "," + std::string(prefix) + std::to_string(i);
  }
  out += "\n";
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  };
  for (size_t k = 0; k < traj.size(); ++k) {
    put(traj.times[k]);
    for (const auto* series : {&traj.y, &traj.u, &traj.z}) {
      for (int i = 0; i < agents; ++i) {
        out += ",";
        put((*series)[k](i));
      }
    }
    out += "\n";
  }
  return out;
}

Trajectory parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("csv: empty file");
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header[0] != "t" || (header.size() - 1) % 3 != 0) {
    throw Error("csv: line 1: expected header t,y1..yN,u1..uN,z1..zN");
  }
  const int agents = static_cast<int>((header.size() - 1) / 3);
  for (int i = 0; i < agents; ++i) {
    if (header[1 + i] != "y" + std::to_string(i + 1) ||
        header[1 + agents + i] != "u" + std::to_string(i + 1) ||
        header[1 + 2 * agents + i] != "z" + std::to_string(i + 1)) {
      throw Error("csv: line 1: unexpected column names");
    }
  }
  Trajectory traj;
  traj.agents = agents;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> vals;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error("csv: line " + std::to_string(line_no) +
                    ": malformed number '" + cell + "'");
      }
    }
    if (vals.size() != header.size()) {
      throw Error("csv: line " + std::to_string(line_no) + ": expected " +
                  std::to_string(header.size()) + " fields, got " +
                  std::to_string(vals.size()));
    }
    traj.times.push_back(vals[0]);
    const auto seg = [&](int offset) {
      return VectorXd(Eigen::Map<const VectorXd>(vals.data() + offset, agents));
    };
    traj.y.push_back(seg(1));
    traj.u.push_back(seg(1 + agents));
    traj.z.push_back(seg(1 + 2 * agents));
  }
  if (traj.times.empty()) throw Error("csv: no data rows");
  return traj;
}

}  // namespace dooc
