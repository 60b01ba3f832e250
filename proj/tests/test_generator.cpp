#include <gtest/gtest.h>

#include <random>

#include "dooc/generator.hpp"
#include "fixtures.hpp"

using namespace dooc;

namespace {

Digraph pair_graph() { return Digraph(2, {{0, 1, 1.0}, {1, 0, 1.0}}); }

}  // namespace

TEST(GeneratorRhs, IdenticalCostsAtTargetIsEquilibrium) {
  const auto costs = fixtures::average_costs({3, 3, 3, 3});
  GeneratorState s{VectorXd::Constant(4, 3.0), VectorXd::Zero(4)};
  const auto r = generator_rhs(s, costs, graphs::directed_cycle(4), {1.0, 1.0});
  EXPECT_EQ(r.z_dot.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(r.v_dot.cwiseAbs().maxCoeff(), 0.0);
}

TEST(GeneratorRhs, TwoAgentHandEvaluation) {
  const auto costs = fixtures::average_costs({0, 2});
  GeneratorState s{VectorXd(2), VectorXd::Zero(2)};
  s.z << 0, 2;
  const auto r = generator_rhs(s, costs, pair_graph(), {1.0, 1.0});
  EXPECT_DOUBLE_EQ(r.z_dot(0), 2.0);
  EXPECT_DOUBLE_EQ(r.z_dot(1), -2.0);
  EXPECT_DOUBLE_EQ(r.v_dot(0), -2.0);
  EXPECT_DOUBLE_EQ(r.v_dot(1), 2.0);
}

TEST(GeneratorRhs, DualTermEntersWithLaplacianSign) {
  const auto costs = fixtures::average_costs({0, 0});
  GeneratorState s{VectorXd::Zero(2), VectorXd(2)};
  s.v << 1, 0;
  const auto r = generator_rhs(s, costs, pair_graph(), {1.0, 1.0});
  // z' = -L v
  EXPECT_DOUBLE_EQ(r.z_dot(0), -1.0);
  EXPECT_DOUBLE_EQ(r.z_dot(1), 1.0);
}

TEST(GeneratorRhs, EdgelessGraphIsGradientFlow) {
  const auto costs = fixtures::average_costs({1, -2, 4});
  GeneratorState s{VectorXd(3), VectorXd(3)};
  s.z << 0.5, 0.5, 0.5;
  s.v << 7, -1, 3;
  const auto r = generator_rhs(s, costs, Digraph(3), {2.0, 5.0});
  EXPECT_DOUBLE_EQ(r.z_dot(0), -2.0 * (0.5 - 1));
  EXPECT_DOUBLE_EQ(r.z_dot(1), -2.0 * (0.5 + 2));
  EXPECT_DOUBLE_EQ(r.z_dot(2), -2.0 * (0.5 - 4));
  EXPECT_EQ(r.v_dot.cwiseAbs().maxCoeff(), 0.0);
}

TEST(GeneratorRhs, BalancedGraphConservesSumOfV) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const auto costs = fixtures::example2_costs();
  for (int k = 0; k < 20; ++k) {
    GeneratorState s{VectorXd(4), VectorXd(4)};
    for (int i = 0; i < 4; ++i) {
      s.z(i) = u(rng);
      s.v(i) = u(rng);
    }
    const auto r = generator_rhs(s, costs, graphs::directed_cycle(4), {1.0, 15.0});
    EXPECT_NEAR(r.v_dot.sum(), 0.0, 1e-12);
  }
}

TEST(TuneAlphaBeta, Examples) {
  auto g = tune_alpha_beta(1.0, 1.0, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(g.alpha, 2.0);
  EXPECT_DOUBLE_EQ(g.beta, 96.0);
  g = tune_alpha_beta(0.5, 1.5, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(g.alpha, 9.0);
  EXPECT_DOUBLE_EQ(g.beta, 1944.0);
  g = tune_alpha_beta(1.0, 1.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(g.alpha, 2.0);
  EXPECT_DOUBLE_EQ(g.beta, 24.0);
  EXPECT_THROW(tune_alpha_beta(1.0, 1.0, 0.0, 1.0), Error);
}

TEST(GeneratorEquilibrium, Examples) {
  const auto g = graphs::directed_cycle(4);
  const GeneratorGains gains{1.0, 15.0};
  auto costs = fixtures::average_costs({1, 3, 5, 7});
  GeneratorState s{VectorXd::Constant(4, 4.0), equilibrium_v(costs, g, 1.0, 4.0)};
  EXPECT_TRUE(generator_equilibrium_check(s, costs, g, gains, 1e-9));

  costs = fixtures::example2_costs();
  const double y = global_minimizer(costs);
  s = {VectorXd::Constant(4, y), equilibrium_v(costs, g, 1.0, y)};
  EXPECT_TRUE(generator_equilibrium_check(s, costs, g, gains, 1e-9));

  s.z.setZero();
  EXPECT_FALSE(generator_equilibrium_check(s, costs, g, gains, 1e-6));
}
