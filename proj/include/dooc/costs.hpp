#pragma once

#include <string>
#include <variant>
#include <vector>

namespace dooc {

namespace cost {

/// (c/2) (y - target)^2
struct Quadratic {
  double c = 1.0;
  double target = 0.0;
};

/// y^2 / (a ln(y^2 + b)) + (1/2) (y - target)^2, b >= 2
struct ScaledLogQuadratic {
  double a = 1.0;
  double b = 2.0;
  double target = 0.0;
};

/// y^2 / (a sqrt(y^2 + 1)) + (1/2) y^2
struct SqrtRatioQuadratic {
  double a = 1.0;
};

/// (1/2) ln(exp(-s y) + exp(s y)) + (1/2) y^2
struct LogSumExpQuadratic {
  double s = 1.0;
};

}  // namespace cost

using CostFamily = std::variant<cost::Quadratic, cost::ScaledLogQuadratic,
                                cost::SqrtRatioQuadratic,
                                cost::LogSumExpQuadratic>;

/// A private strongly convex cost together with its claimed strong-convexity
/// modulus and gradient Lipschitz constant.
struct CostFunction {
  CostFamily family;
  double l_lower = 1.0;
  double l_upper = 1.0;

  /// Quadratic with exact constants l_lower = l_upper = c.
  static CostFunction quadratic(double c, double target);
  /// Validates family parameters and 0 < l_lower <= l_upper.
  void validate() const;
  std::string family_name() const;
};

using CostEnsemble = std::vector<CostFunction>;

double eval(const CostFunction& f, double y);
double grad(const CostFunction& f, double y);
/// Central difference of `grad`; used to linearize costs.
double curvature(const CostFunction& f, double y, double h = 1e-5);

/// Sampling check of strong convexity and gradient Lipschitz continuity on
/// `samples` evenly spaced points of [lo, hi], all pairs.
bool verify_assumption1(const CostFunction& f, double lo, double hi,
                        int samples);

double aggregate_grad(const CostEnsemble& costs, double y);

/// Minimizer of sum_i f_i by bracketing the sign change of the aggregate
/// gradient and bisecting. Throws Error if no bracket within |y| <= 1e9.
double global_minimizer(const CostEnsemble& costs, double tol = 1e-12);

/// min_i l_lower and max_i l_upper.
double ensemble_l_lower(const CostEnsemble& costs);
double ensemble_l_upper(const CostEnsemble& costs);

}  // namespace dooc
