#include <gtest/gtest.h>

#include <cmath>

#include "dooc/costs.hpp"
#include "fixtures.hpp"

using namespace dooc;

namespace {

CostEnsemble all_families() {
  CostEnsemble c = fixtures::example2_costs();
  c.push_back(CostFunction::quadratic(2.0, -3.0));
  c.push_back({cost::ScaledLogQuadratic{20.0, 3.0, -1.0}, 0.5, 1.5});
  c.push_back({cost::LogSumExpQuadratic{1.0}, 0.5, 1.5});
  return c;
}

}  // namespace

TEST(CostEval, Values) {
  const auto q = CostFunction::quadratic(1.0, 8.0);
  EXPECT_EQ(eval(q, 8.0), 0.0);
  EXPECT_DOUBLE_EQ(eval(q, 0.0), 32.0);
  const CostFunction lse{cost::LogSumExpQuadratic{0.05}};
  EXPECT_NEAR(eval(lse, 0.0), 0.5 * std::log(2.0), 1e-15);
}

TEST(CostEval, LogSumExpStaysFiniteForLargeArguments) {
  const CostFunction lse{cost::LogSumExpQuadratic{0.05}};
  const double y = 3e4;
  EXPECT_TRUE(std::isfinite(eval(lse, y)));
  EXPECT_NEAR(eval(lse, y), 0.5 * 0.05 * y + 0.5 * y * y, 1e-6 * y * y);
}

TEST(CostGrad, Values) {
  EXPECT_DOUBLE_EQ(grad(CostFunction::quadratic(1.0, 8.0), 5.0), -3.0);
  EXPECT_EQ(grad(CostFunction{cost::LogSumExpQuadratic{0.05}}, 0.0), 0.0);
  const CostFunction f2{cost::ScaledLogQuadratic{160.0, 2.0, 5.0}};
  const double h = 1e-5;
  const double fd = (eval(f2, 1.0 + h) - eval(f2, 1.0 - h)) / (2 * h);
  EXPECT_NEAR(grad(f2, 1.0), fd, 1e-8 * std::abs(fd));
}

TEST(CostGrad, FiniteDifferenceSuite) {
  for (const auto& f : all_families()) {
    for (int k = 0; k < 100; ++k) {
      const double y = -50.0 + 100.0 * (k + 0.37) / 100.0;
      const double h = 1e-5 * std::max(1.0, std::abs(y));
      const double fd = (eval(f, y + h) - eval(f, y - h)) / (2 * h);
      const double g = grad(f, y);
      EXPECT_LE(std::abs(g - fd), 1e-6 * std::max(1.0, std::abs(g)))
          << f.family_name() << " at y=" << y;
    }
  }
}

TEST(CostCurvature, MatchesQuadraticCoefficient) {
  EXPECT_NEAR(curvature(CostFunction::quadratic(2.0, 1.0), 0.3), 2.0, 1e-8);
}

TEST(Assumption1, Examples) {
  auto unit = CostFunction::quadratic(1.0, 0.0);
  EXPECT_TRUE(verify_assumption1(unit, -10.0, 10.0, 100));
  for (const auto& f : fixtures::example2_costs())
    EXPECT_TRUE(verify_assumption1(f, -20.0, 20.0, 200)) << f.family_name();
  unit.l_lower = 2.0;
  unit.l_upper = 2.0;
  EXPECT_FALSE(verify_assumption1(unit, -10.0, 10.0, 100));
  auto f4 = fixtures::example2_costs()[3];
  f4.l_lower = 5.0;
  f4.l_upper = 6.0;
  EXPECT_FALSE(verify_assumption1(f4, -20.0, 20.0, 200));
}

TEST(GlobalMinimizer, Examples) {
  EXPECT_NEAR(global_minimizer(fixtures::average_costs({1, 3, 5, 7})), 4.0, 1e-10);
  EXPECT_NEAR(global_minimizer({CostFunction::quadratic(1.0, 8.0)}), 8.0, 1e-10);
  EXPECT_NEAR(global_minimizer(fixtures::example2_costs()), 3.24, 1e-2);
}

TEST(GlobalMinimizer, WeightedQuadraticsGiveWeightedMean) {
  const CostEnsemble c{CostFunction::quadratic(1.0, 0.0),
                       CostFunction::quadratic(3.0, 4.0)};
  EXPECT_NEAR(global_minimizer(c), 3.0, 1e-10);
}

TEST(GlobalMinimizer, FarTargetNeedsBracketGrowth) {
  EXPECT_NEAR(global_minimizer({CostFunction::quadratic(1.0, -1e5)}), -1e5, 1e-6);
}

TEST(GlobalMinimizer, AggregateGradientVanishes) {
  const auto c = fixtures::example2_costs();
  EXPECT_NEAR(aggregate_grad(c, global_minimizer(c)), 0.0, 1e-9);
}

TEST(CostFunction, ValidateRejectsBadBounds) {
  auto f = CostFunction::quadratic(1.0, 0.0);
  f.l_lower = 0.0;
  EXPECT_THROW(f.validate(), Error);
  f.l_lower = 2.0;
  f.l_upper = 1.0;
  EXPECT_THROW(f.validate(), Error);
}
