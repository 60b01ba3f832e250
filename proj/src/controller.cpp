#include "dooc/controller.hpp"

#include <cmath>

#include "dooc/tuning.hpp"

namespace dooc {

VectorXd Gains::observer_l() const {
  VectorXd l(m);
  double power = 1.0;
  for (int r = 1; r <= m; ++r) {
    power *= gamma;
    l(r - 1) = power * k(m - r);
  }
  return l;
}

void Gains::validate() const {
  if (m < 1) throw Error("gains: relative degree must be >= 1");
  if (k.size() != m) {
    throw Error("gains: expected " + std::to_string(m) + " k coefficients, got " +
                std::to_string(k.size()));
  }
  Poly p(k.data(), k.data() + k.size());
  p.push_back(1.0);
  if (!hurwitz_check(p)) throw Error("gains: k polynomial is not Hurwitz");
  if (!(epsilon > 0.0)) throw Error("gains: epsilon must be positive");
  if (!(gamma >= 1.0)) throw Error("gains: gamma must be >= 1");
}

double control_output(const Gains& g, const ControllerState& c, double y,
                      double z) {
  if (g.m == 1) return -g.epsilon * (g.k(0) * c.xi0 + (y - z));
  double acc = g.k(0) * c.xi0 + g.k(1) * (y - z);
  // chi_r carries coefficient k_(r+1) for r = 2..m-1 (1-based).
  for (int r = 2; r <= g.m - 1; ++r) acc += g.k(r) * c.chi(r - 1);
  acc += c.chi(g.m - 1);
  return -g.epsilon * acc;
}

VectorXd observer_rhs(const Gains& g, const VectorXd& chi, double y) {
  if (g.m < 2) throw Error("observer_rhs: observer requires m >= 2");
  if (chi.size() != g.m) throw Error("observer_rhs: chi has wrong length");
  const VectorXd l = g.observer_l();
  const double innovation = chi(0) - y;
  VectorXd out(g.m);
  for (int r = 0; r + 1 < g.m; ++r) out(r) = chi(r + 1) - l(r) * innovation;
  out(g.m - 1) = -l(g.m - 1) * innovation;
  return out;
}

double partial_state_control(const Gains& g, double xi0, const VectorXd& x,
                             double z, const MatrixXd& A,
                             const RowVectorXd& C) {
  // derivs(r) = y^(r) = C A^r x, r = 0..m-1
  VectorXd derivs(g.m);
  RowVectorXd row = C;
  for (int r = 0; r < g.m; ++r) {
    derivs(r) = row.dot(x);
    row = row * A;
  }
  if (g.m == 1) return -g.epsilon * (g.k(0) * xi0 + (derivs(0) - z));
  double acc = g.k(0) * xi0 + g.k(1) * (derivs(0) - z);
  for (int r = 1; r <= g.m - 2; ++r) acc += g.k(r + 1) * derivs(r);
  acc += derivs(g.m - 1);
  return -g.epsilon * acc;
}

VectorXd initial_observer_state(int m, double y0) {
  if (m < 2) return VectorXd();
  VectorXd chi = VectorXd::Zero(m);
  chi(0) = y0;
  return chi;
}

}  // namespace dooc
