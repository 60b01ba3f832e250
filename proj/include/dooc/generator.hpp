#pragma once

#include "dooc/costs.hpp"
#include "dooc/graph.hpp"
#include "dooc/linalg.hpp"

namespace dooc {

/// Distributed optimal signal generator: each agent i keeps an estimate z_i
/// of the global minimizer and an auxiliary state v_i,
///   z_i' = -alpha grad f_i(z_i) - beta sum_j a_ij (z_i - z_j)
///          - sum_j a_ij (v_i - v_j)
///   v_i' = alpha beta sum_j a_ij (z_i - z_j)
/// Converges to 1 y* on weight-balanced strongly connected digraphs from any
/// initial (z, v).
struct GeneratorState {
  VectorXd z;
  VectorXd v;
};

struct GeneratorGains {
  double alpha = 1.0;
  double beta = 1.0;

  void validate() const;
};

struct GeneratorRates {
  VectorXd z_dot;
  VectorXd v_dot;
};

/// Neighbor sums run in ascending neighbor index so results are bitwise
/// reproducible.
GeneratorRates generator_rhs(const GeneratorState& s, const CostEnsemble& costs,
                             const Digraph& g, const GeneratorGains& gains);

/// Lower bounds on alpha and beta that guarantee exponential convergence,
/// taken with equality. Throws if lambda2 <= 0 (disconnected or unbalanced).
GeneratorGains tune_alpha_beta(double l_lower, double l_upper, double lambda2,
                               double lambda_n);

/// Minimum-norm v solving L v = -alpha grad f~(1 y*), i.e. the v part of an
/// equilibrium with z = 1 y*.
VectorXd equilibrium_v(const CostEnsemble& costs, const Digraph& g,
                       double alpha, double y_star);

/// True iff |z'|, |v'| <= tol and max_i |z_i - y*| <= tol, with y* from the
/// bisection oracle.
bool generator_equilibrium_check(const GeneratorState& s,
                                 const CostEnsemble& costs, const Digraph& g,
                                 const GeneratorGains& gains, double tol);

}  // namespace dooc
