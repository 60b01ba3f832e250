#pragma once

#include <cmath>
#include <random>

#include "dooc/costs.hpp"
#include "dooc/linalg.hpp"

namespace fixtures {

inline dooc::CostEnsemble example2_costs() {
  using namespace dooc;
  CostEnsemble c(4);
  c[0].family = cost::Quadratic{1.0, 8.0};
  c[1].family = cost::ScaledLogQuadratic{160.0, 2.0, 5.0};
  c[2].family = cost::SqrtRatioQuadratic{40.0};
  c[3].family = cost::LogSumExpQuadratic{0.05};
  for (auto& f : c) {
    f.l_lower = 0.5;
    f.l_upper = 1.5;
  }
  return c;
}

inline dooc::CostEnsemble average_costs(std::initializer_list<double> targets) {
  dooc::CostEnsemble c;
  for (double t : targets) c.push_back(dooc::CostFunction::quadratic(1.0, t));
  return c;
}

/// Random matrix shifted so every eigenvalue has real part <= -margin.
inline dooc::MatrixXd random_hurwitz(std::mt19937_64& rng, int n,
                                     double margin = 0.1) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  dooc::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = u(rng);
  Eigen::EigenSolver<dooc::MatrixXd> es(a);
  const double shift = es.eigenvalues().real().maxCoeff() + margin;
  return a - shift * dooc::MatrixXd::Identity(n, n);
}

}  // namespace fixtures
