#include "dooc/costs.hpp"

#include <algorithm>
#include <cmath>

#include "dooc/linalg.hpp"

namespace dooc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// log(exp(-x) + exp(x)) without overflow.
double log_two_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax));
}

}  // namespace

CostFunction CostFunction::quadratic(double c, double target) {
  return CostFunction{cost::Quadratic{c, target}, c, c};
}

void CostFunction::validate() const {
  if (!(l_lower > 0.0) || !(l_upper >= l_lower)) {
    throw Error("cost: need 0 < l_lower <= l_upper");
  }
  std::visit(overloaded{
                 [](const cost::Quadratic& q) {
                   if (!(q.c > 0.0)) throw Error("quadratic: c must be > 0");
                 },
                 [](const cost::ScaledLogQuadratic& q) {
                   if (!(q.a > 0.0)) throw Error("scaled_log_quadratic: a must be > 0");
                   if (!(q.b >= 2.0)) throw Error("scaled_log_quadratic: b must be >= 2");
                 },
                 [](const cost::SqrtRatioQuadratic& q) {
                   if (!(q.a > 0.0)) throw Error("sqrt_ratio_quadratic: a must be > 0");
                 },
                 [](const cost::LogSumExpQuadratic&) {},
             },
             family);
}

std::string CostFunction::family_name() const {
  return std::visit(
      overloaded{
          [](const cost::Quadratic&) { return std::string("quadratic"); },
          [](const cost::ScaledLogQuadratic&) { return std::string("scaled_log_quadratic"); },
          [](const cost::SqrtRatioQuadratic&) { return std::string("sqrt_ratio_quadratic"); },
          [](const cost::LogSumExpQuadratic&) { return std::string("log_sum_exp_quadratic"); },
      },
      family);
}

double eval(const CostFunction& f, double y) {
  return std::visit(
      overloaded{
          [y](const cost::Quadratic& q) {
            const double d = y - q.target;
            return 0.5 * q.c * d * d;
          },
          [y](const cost::ScaledLogQuadratic& q) {
            const double d = y - q.target;
            return y * y / (q.a * std::log(y * y + q.b)) + 0.5 * d * d;
          },
          [y](const cost::SqrtRatioQuadratic& q) {
            return y * y / (q.a * std::sqrt(y * y + 1.0)) + 0.5 * y * y;
          },
          [y](const cost::LogSumExpQuadratic& q) {
            return 0.5 * log_two_cosh(q.s * y) + 0.5 * y * y;
          },
      },
      f.family);
}

double grad(const CostFunction& f, double y) {
  return std::visit(
      overloaded{
          [y](const cost::Quadratic& q) { return q.c * (y - q.target); },
          [y](const cost::ScaledLogQuadratic& q) {
            const double r = y * y + q.b;
            const double lg = std::log(r);
            return 2.0 * y / (q.a * lg) -
                   2.0 * y * y * y / (q.a * lg * lg * r) + (y - q.target);
          },
          [y](const cost::SqrtRatioQuadratic& q) {
            const double r = y * y + 1.0;
            return y * (y * y + 2.0) / (q.a * r * std::sqrt(r)) + y;
          },
          [y](const cost::LogSumExpQuadratic& q) {
            return 0.5 * q.s * std::tanh(q.s * y) + y;
          },
      },
      f.family);
}

double curvature(const CostFunction& f, double y, double h) {
  return (grad(f, y + h) - grad(f, y - h)) / (2.0 * h);
}

bool verify_assumption1(const CostFunction& f, double lo, double hi,
                        int samples) {
  if (samples < 2) throw Error("verify_assumption1: need at least 2 samples");
  if (!(hi > lo)) throw Error("verify_assumption1: degenerate interval");
  constexpr double kSlack = 1e-9;
  std::vector<double> ys(static_cast<size_t>(samples));
  std::vector<double> gs(ys.size());
  for (int k = 0; k < samples; ++k) {
    ys[k] = lo + (hi - lo) * k / (samples - 1);
    gs[k] = grad(f, ys[k]);
  }
  for (size_t i = 0; i < ys.size(); ++i) {
    for (size_t j = i + 1; j < ys.size(); ++j) {
      const double dy = ys[i] - ys[j];
      const double dg = gs[i] - gs[j];
      if (f.l_lower * dy * dy > dg * dy + kSlack) return false;
      if (std::abs(dg) > f.l_upper * std::abs(dy) + kSlack) return false;
    }
  }
  return true;
}

double aggregate_grad(const CostEnsemble& costs, double y) {
  double sum = 0.0;
  for (const auto& f : costs) sum += grad(f, y);
  return sum;
}

double global_minimizer(const CostEnsemble& costs, double tol) {
  if (costs.empty()) throw Error("global_minimizer: empty ensemble");
  if (!(tol > 0.0)) throw Error("global_minimizer: tol must be positive");
  double lo = -1.0;
  double hi = 1.0;
  while (!(aggregate_grad(costs, lo) <= 0.0 && aggregate_grad(costs, hi) >= 0.0)) {
    lo *= 2.0;
    hi *= 2.0;
    if (hi > 1e9) {
      throw Error("global_minimizer: no sign change of the aggregate gradient "
                  "within |y| <= 1e9");
    }
  }
  while (true) {
    const double mid = 0.5 * (lo + hi);
    const double g = aggregate_grad(costs, mid);
    if (std::abs(g) <= tol) return mid;
    if (mid <= lo || mid >= hi) return mid;  // interval exhausted
    (g < 0.0 ? lo : hi) = mid;
  }
}

double ensemble_l_lower(const CostEnsemble& costs) {
  double out = costs.at(0).l_lower;
  for (const auto& f : costs) out = std::min(out, f.l_lower);
  return out;
}

double ensemble_l_upper(const CostEnsemble& costs) {
  double out = costs.at(0).l_upper;
  for (const auto& f : costs) out = std::max(out, f.l_upper);
  return out;
}

}  // namespace dooc
