#include <gtest/gtest.h>

#include <random>

#include "dooc/graph.hpp"

using namespace dooc;

TEST(Laplacian, FourCycleSpectrum) {
  const auto spec = laplacian(graphs::directed_cycle(4));
  ASSERT_EQ(spec.eigenvalues.size(), 4);
  const double expected[] = {0.0, 1.0, 1.0, 2.0};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(spec.eigenvalues(i), expected[i], 1e-9);
  EXPECT_NEAR(spec.lambda2(), 1.0, 1e-9);
  EXPECT_NEAR(spec.lambda_max(), 2.0, 1e-9);
}

TEST(Laplacian, SingleNode) {
  const auto spec = laplacian(Digraph(1));
  EXPECT_EQ(spec.laplacian.rows(), 1);
  EXPECT_EQ(spec.laplacian(0, 0), 0.0);
  EXPECT_NEAR(spec.eigenvalues(0), 0.0, 1e-15);
}

TEST(Laplacian, CompleteThreeIsSymmetric) {
  const auto spec = laplacian(graphs::complete(3));
  EXPECT_TRUE(spec.laplacian.isApprox(spec.laplacian.transpose()));
  EXPECT_NEAR(spec.eigenvalues(0), 0.0, 1e-12);
  EXPECT_NEAR(spec.eigenvalues(1), 3.0, 1e-12);
  EXPECT_NEAR(spec.eigenvalues(2), 3.0, 1e-12);
}

TEST(Laplacian, RowsSumToZero) {
  Digraph g(3, {{0, 1, 2.0}, {1, 2, 0.5}, {2, 0, 1.5}, {0, 2, 3.0}});
  const MatrixXd l = laplacian_matrix(g);
  EXPECT_LT(l.rowwise().sum().cwiseAbs().maxCoeff(), 1e-15);
  // weight(receiver, sender)
  EXPECT_EQ(g.weight(1, 0), 2.0);
  EXPECT_EQ(l(1, 0), -2.0);
}

TEST(Laplacian, JacobiMatchesEigenOnRandomWeights) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    Digraph g(6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        if (i != j && u(rng) > 1.0) g.add_edge(i, j, u(rng));
    const auto spec = laplacian(g);
    Eigen::SelfAdjointEigenSolver<MatrixXd> oracle(spec.sym);
    EXPECT_LT((spec.eigenvalues - oracle.eigenvalues()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Connectivity, Examples) {
  EXPECT_TRUE(is_strongly_connected(graphs::directed_cycle(4)));
  EXPECT_FALSE(is_strongly_connected(Digraph(2)));
  EXPECT_FALSE(is_strongly_connected(Digraph(3, {{0, 1, 1.0}, {1, 2, 1.0}})));
  EXPECT_TRUE(is_strongly_connected(Digraph(1)));
}

TEST(Balance, Examples) {
  EXPECT_TRUE(is_weight_balanced(graphs::directed_cycle(4)));
  EXPECT_FALSE(is_weight_balanced(Digraph(3, {{0, 1, 1.0}, {0, 2, 1.0}})));
  auto g = graphs::directed_cycle(4);
  g.add_edge(0, 1, 2.0);
  EXPECT_FALSE(is_weight_balanced(g));
}

TEST(Digraph, RejectsBadEdges) {
  EXPECT_THROW(Digraph(2, {{0, 0, 1.0}}), Error);
  EXPECT_THROW(Digraph(2, {{0, 1, -1.0}}), Error);
  EXPECT_THROW(Digraph(2, {{0, 2, 1.0}}), Error);
}
