#pragma once

#include "dooc/linalg.hpp"

namespace dooc {

/// Output-feedback integral controller parameters. k holds k_1..k_m, the
/// coefficients of p(s) = k_1 + k_2 s + ... + k_m s^(m-1) + s^m.
struct Gains {
  int m = 0;
  VectorXd k;
  double lambda0 = 1.0;
  double epsilon = 1.0;
  double gamma = 1.0;

  /// l_r = gamma^r k_(m-r+1), r = 1..m.
  VectorXd observer_l() const;
  /// Throws Error unless m >= 1, k has m entries, p(s) is Hurwitz,
  /// epsilon > 0 and gamma >= 1.
  void validate() const;
};

/// Which derivative source feeds the control law.
enum class ControlMode {
  OutputFeedback,  // dirty-derivative observer
  PartialState,    // true derivatives C A^r x (reference design)
};

struct ControllerState {
  double xi0 = 0.0;
  VectorXd chi;  // empty when m == 1
};

/// u = -eps [k1 xi0 + k2 (y - z) + k3 chi_2 + ... + k_m chi_(m-1) + chi_m];
/// for m == 1, u = -eps [k1 xi0 + (y - z)].
double control_output(const Gains& g, const ControllerState& c, double y,
                      double z);

/// Dirty-derivative observer: chi_r' = chi_(r+1) - l_r (chi_1 - y),
/// chi_m' = -l_m (chi_1 - y). Requires m >= 2.
VectorXd observer_rhs(const Gains& g, const VectorXd& chi, double y);

inline double integral_rhs(double y, double z) { return y - z; }

/// The same law with the true output derivatives y^(r) = C A^r x in place of
/// the observer states.
double partial_state_control(const Gains& g, double xi0, const VectorXd& x,
                             double z, const MatrixXd& A,
                             const RowVectorXd& C);

/// Default observer initialization chi(0) = (y(0), 0, ..., 0).
VectorXd initial_observer_state(int m, double y0);

}  // namespace dooc
