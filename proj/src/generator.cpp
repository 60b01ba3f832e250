#include "dooc/generator.hpp"

#include <algorithm>
#include <cmath>

namespace dooc {

void GeneratorGains::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw Error("generator gains: alpha and beta must be positive");
  }
}

GeneratorRates generator_rhs(const GeneratorState& s, const CostEnsemble& costs,
                             const Digraph& g, const GeneratorGains& gains) {
  const int n = g.size();
  if (s.z.size() != n || s.v.size() != n ||
      static_cast<int>(costs.size()) != n) {
    throw Error("generator_rhs: dimension mismatch");
  }
  GeneratorRates out{VectorXd(n), VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    double dz = 0.0;
    double dv = 0.0;
    for (int j = 0; j < n; ++j) {
      const double a = g.weight(i, j);
      if (a == 0.0) continue;
      dz += a * (s.z(i) - s.z(j));
      dv += a * (s.v(i) - s.v(j));
    }
    out.z_dot(i) = -gains.alpha * grad(costs[i], s.z(i)) - gains.beta * dz - dv;
    out.v_dot(i) = gains.alpha * gains.beta * dz;
  }
  return out;
}

GeneratorGains tune_alpha_beta(double l_lower, double l_upper, double lambda2,
                               double lambda_n) {
  if (!(l_lower > 0.0)) throw Error("tune_alpha_beta: l_lower must be positive");
  if (!(lambda2 > 0.0)) {
    throw Error("tune_alpha_beta: lambda2 <= 0, graph is not strongly "
                "connected and weight-balanced");
  }
  GeneratorGains out;
  out.alpha = std::max({1.0, 1.0 / l_lower,
                        2.0 * l_upper * l_upper / (l_lower * lambda2)});
  out.beta = std::max({1.0, 1.0 / lambda2,
                       6.0 * out.alpha * out.alpha * lambda_n * lambda_n /
                           (lambda2 * lambda2)});
  return out;
}

VectorXd equilibrium_v(const CostEnsemble& costs, const Digraph& g,
                       double alpha, double y_star) {
  const int n = g.size();
  VectorXd rhs(n);
  for (int i = 0; i < n; ++i) rhs(i) = -alpha * grad(costs[i], y_star);
  const MatrixXd l = laplacian_matrix(g);
  return l.completeOrthogonalDecomposition().solve(rhs);
}

bool generator_equilibrium_check(const GeneratorState& s,
                                 const CostEnsemble& costs, const Digraph& g,
                                 const GeneratorGains& gains, double tol) {
  const auto rates = generator_rhs(s, costs, g, gains);
  const double y_star = global_minimizer(costs);
  return rates.z_dot.lpNorm<Eigen::Infinity>() <= tol &&
         rates.v_dot.lpNorm<Eigen::Infinity>() <= tol &&
         (s.z.array() - y_star).abs().maxCoeff() <= tol;
}

}  // namespace dooc
