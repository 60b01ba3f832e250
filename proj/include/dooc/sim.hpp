#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dooc/controller.hpp"
#include "dooc/costs.hpp"
#include "dooc/generator.hpp"
#include "dooc/graph.hpp"
#include "dooc/linalg.hpp"
#include "dooc/plant.hpp"

namespace dooc {

/// Everything the closed loop needs: network, agent model, private costs and
/// the controller/generator parameters. All agents share the plant model.
struct Scenario {
  Digraph graph{1};
  AffinePlant plant;
  CostEnsemble costs;
  Gains gains;
  GeneratorGains generator;
  ControlMode mode = ControlMode::OutputFeedback;
  VectorXd z0;  // default generator initialization; empty means zeros

  int agents() const { return graph.size(); }
  /// Dimensions and gain consistency; throws Error.
  void validate() const;
};

struct ScheduleEntry {
  double t = 0.0;
  VectorXd w;
};

/// Optional per-agent overrides of the default initial state.
struct InitialState {
  std::optional<MatrixXd> x;    // n x N
  std::optional<VectorXd> xi0;  // N
  std::optional<MatrixXd> chi;  // m x N
  std::optional<VectorXd> z;    // N
  std::optional<VectorXd> v;    // N
};

struct SimConfig {
  double h = 1e-3;
  double t_final = 50.0;
  int record_stride = 10;
  std::vector<ScheduleEntry> schedule;  // first entry at t = 0
  InitialState initial;
  bool randomize = false;
  std::uint64_t seed = 0;

  void validate(int n_w) const;
};

inline constexpr double kDivergenceThreshold = 1e12;

/// Stacked closed-loop state: per agent [x_i (n), xi0_i, chi_i (m or 0)],
/// then z (N), then v (N).
class StateLayout {
 public:
  StateLayout(int agents, int n, int chi_dim)
      : agents_(agents), n_(n), chi_(chi_dim) {}
  int agents() const { return agents_; }
  int n() const { return n_; }
  int chi_dim() const { return chi_; }
  int block() const { return n_ + 1 + chi_; }
  int x(int i) const { return i * block(); }
  int xi0(int i) const { return i * block() + n_; }
  int chi(int i) const { return i * block() + n_ + 1; }
  int z() const { return agents_ * block(); }
  int v() const { return z() + agents_; }
  int size() const { return v() + agents_; }

  static StateLayout of(const Scenario& s);

 private:
  int agents_, n_, chi_;
};

/// Closed-loop derivative at the parameter materialized in `pm`.
/// Writes the control inputs to `u_out` when given.
VectorXd closed_loop_rhs(const VectorXd& state, const Scenario& s,
                         const PlantMatrices& pm, VectorXd* u_out = nullptr);

using Rhs = std::function<VectorXd(double, const VectorXd&)>;

/// Classical fourth-order Runge-Kutta step. Throws Error on a non-finite
/// stage.
VectorXd rk4_step(const Rhs& f, const VectorXd& state, double t, double h);

struct Trajectory {
  int agents = 0;
  std::vector<double> times;
  std::vector<VectorXd> y, u, z, v, xi0;
  std::vector<MatrixXd> x;    // n x N per sample
  std::vector<MatrixXd> chi;  // chi_dim x N per sample

  size_t size() const { return times.size(); }
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, Trajectory partial,
                  VectorXd last_valid, double t)
      : Error(what),
        partial_(std::move(partial)),
        last_valid_(std::move(last_valid)),
        t_(t) {}
  const Trajectory& partial() const { return partial_; }
  const VectorXd& last_valid_state() const { return last_valid_; }
  double time() const { return t_; }

 private:
  Trajectory partial_;
  VectorXd last_valid_;
  double t_;
};

VectorXd initial_state(const Scenario& s, const SimConfig& cfg);

/// Fixed-step RK4 from 0 to t_final. Steps land exactly on schedule switch
/// times and on t_final. Records every record_stride steps plus the final
/// instant. Throws DivergenceError if any |state| exceeds 1e12.
Trajectory simulate(const Scenario& s, const SimConfig& cfg);

struct PhaseStats {
  double t_start = 0.0;
  double t_end = 0.0;
  double final_error = 0.0;
  double max_error = 0.0;
  bool settled = false;
  double settle_time = 0.0;  // absolute time, valid when settled
  double max_abs_u = 0.0;
};

struct ConvergenceReport {
  double y_star = 0.0;
  double tol = 0.0;
  double final_error = 0.0;
  bool settled = false;  // every phase settled
  double settle_time = 0.0;  // overall, sustained to the end
  double max_abs_u = 0.0;
  VectorXd final_u;
  std::vector<PhaseStats> phases;
};

/// `switch_times` are the schedule times after t = 0; they split the run into
/// phases that are judged separately.
ConvergenceReport convergence_report(const Trajectory& traj, double y_star,
                                     double tol,
                                     const std::vector<double>& switch_times = {});

/// CSV with header t,y1..yN,u1..uN,z1..zN and 17 significant digits.
std::string trajectory_csv(const Trajectory& traj);

/// Parses the CSV written by trajectory_csv (t, y, u and z columns only).
/// Throws Error with the offending line number.
Trajectory parse_trajectory_csv(const std::string& text);

}  // namespace dooc
