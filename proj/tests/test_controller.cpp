#include <gtest/gtest.h>

#include "dooc/controller.hpp"

using namespace dooc;

namespace {

Gains reference_gains() {
  Gains g;
  g.m = 2;
  g.k = VectorXd(2);
  g.k << 1, 2;
  g.epsilon = 6.0;
  g.gamma = 10.0;
  return g;
}

}  // namespace

TEST(ControlOutput, ZeroStateGivesZero) {
  ControllerState c{0.0, VectorXd::Zero(2)};
  EXPECT_EQ(control_output(reference_gains(), c, 1.5, 1.5), 0.0);
}

TEST(ControlOutput, HandEvaluation) {
  ControllerState c{1.0, VectorXd(2)};
  c.chi << 123.0, -0.25;  // chi_1 does not enter for m = 2
  EXPECT_DOUBLE_EQ(control_output(reference_gains(), c, 0.5, 0.0), -10.5);
}

TEST(ControlOutput, ThirdOrderUsesMiddleEstimate) {
  Gains g;
  g.m = 3;
  g.k = VectorXd(3);
  g.k << 8, 12, 6;
  g.epsilon = 2.0;
  ControllerState c{0.5, VectorXd(3)};
  c.chi << 9.0, 1.0, -3.0;
  // -eps [k1 xi0 + k2 (y - z) + k3 chi_2 + chi_3]
  EXPECT_DOUBLE_EQ(control_output(g, c, 2.0, 1.0), -2.0 * (4.0 + 12.0 + 6.0 - 3.0));
}

TEST(ControlOutput, Superposition) {
  const auto g = reference_gains();
  ControllerState a{0.3, VectorXd(2)}, b{-1.1, VectorXd(2)}, s{0.0, VectorXd(2)};
  a.chi << 0.2, 0.7;
  b.chi << -0.4, 1.9;
  s.xi0 = a.xi0 + b.xi0;
  s.chi = a.chi + b.chi;
  const double ua = control_output(g, a, 0.4, 0.1);
  const double ub = control_output(g, b, -2.0, 0.5);
  EXPECT_NEAR(control_output(g, s, 0.4 - 2.0, 0.1 + 0.5), ua + ub, 1e-12);
}

TEST(Observer, GainsAndRates) {
  const auto g = reference_gains();
  const VectorXd l = g.observer_l();
  EXPECT_DOUBLE_EQ(l(0), 20.0);
  EXPECT_DOUBLE_EQ(l(1), 100.0);
  const VectorXd rate = observer_rhs(g, VectorXd::Zero(2), 1.0);
  EXPECT_DOUBLE_EQ(rate(0), 20.0);
  EXPECT_DOUBLE_EQ(rate(1), 100.0);
}

TEST(Observer, ConsistentConstantEstimateIsAtRest) {
  const auto g = reference_gains();
  const VectorXd rate = observer_rhs(g, initial_observer_state(2, 3.7), 3.7);
  EXPECT_EQ(rate.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Observer, RejectsFirstOrder) {
  Gains g;
  g.m = 1;
  g.k = VectorXd::Constant(1, 1.0);
  EXPECT_THROW(observer_rhs(g, VectorXd::Zero(1), 0.0), Error);
}

TEST(Integral, Rate) {
  EXPECT_EQ(integral_rhs(2.0, 2.0), 0.0);
  EXPECT_EQ(integral_rhs(3.0, 1.0), 2.0);
}

TEST(PartialState, DoubleIntegrator) {
  MatrixXd a(2, 2);
  a << 0, 1, 0, 0;
  RowVectorXd c(2);
  c << 1, 0;
  const auto g = reference_gains();
  EXPECT_EQ(partial_state_control(g, 0.0, VectorXd::Zero(2), 0.0, a, c), 0.0);
  VectorXd x(2);
  x << 1, 2;
  EXPECT_DOUBLE_EQ(partial_state_control(g, 0.0, x, 0.0, a, c), -24.0);
}

TEST(PartialState, MatchesOutputLawWithTrueDerivatives) {
  MatrixXd a(3, 3);
  a << -0.6, 1, 0, -0.7, 0, 1, 1, -0.2, 1;
  RowVectorXd c(3);
  c << 0, 0.6, 0;
  const auto g = reference_gains();
  for (int k = 0; k < 10; ++k) {
    VectorXd x = VectorXd::LinSpaced(3, -1.0 + 0.1 * k, 2.0 - 0.3 * k);
    const double z = 0.25 * k, xi0 = 0.5 - 0.1 * k;
    ControllerState st{xi0, VectorXd(2)};
    st.chi << c.dot(x), (c * a).dot(x);
    EXPECT_NEAR(partial_state_control(g, xi0, x, z, a, c),
                control_output(g, st, c.dot(x), z), 1e-12);
  }
}

TEST(Gains, Validate) {
  auto g = reference_gains();
  EXPECT_NO_THROW(g.validate());
  g.k << -1, 2;
  EXPECT_THROW(g.validate(), Error);
  g = reference_gains();
  g.epsilon = 0.0;
  EXPECT_THROW(g.validate(), Error);
  g = reference_gains();
  g.gamma = 0.5;
  EXPECT_THROW(g.validate(), Error);
}
