#include <gtest/gtest.h>

#include <random>

#include "dooc/linalg.hpp"

using namespace dooc;

TEST(FaddeevLeverrier, CharacteristicPolynomial) {
  MatrixXd a(2, 2);
  a << 0, 1, -2, -3;  // s^2 + 3s + 2
  const auto cp = faddeev_leverrier(a);
  ASSERT_EQ(cp.coeffs.size(), 3u);
  EXPECT_NEAR(cp.coeffs[0], 2.0, 1e-12);
  EXPECT_NEAR(cp.coeffs[1], 3.0, 1e-12);
  EXPECT_NEAR(cp.coeffs[2], 1.0, 1e-12);
}

TEST(FaddeevLeverrier, AdjugateIdentity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd a(4, 4);
  for (int i = 0; i < 16; ++i) a(i) = u(rng);
  const auto cp = faddeev_leverrier(a);
  const double s = 0.7;
  MatrixXd adj = MatrixXd::Zero(4, 4);
  for (size_t k = 0; k < cp.adj.size(); ++k)
    adj += cp.adj[k] * std::pow(s, static_cast<double>(cp.adj.size() - 1 - k));
  const MatrixXd si_a = s * MatrixXd::Identity(4, 4) - a;
  EXPECT_LT(max_abs(si_a * adj - si_a.determinant() * MatrixXd::Identity(4, 4)), 1e-10);
}

TEST(DurandKerner, RootsOfKnownPolynomials) {
  auto r = durand_kerner({6.0, -5.0, 1.0});  // (s-2)(s-3)
  ASSERT_EQ(r.roots.size(), 2u);
  std::vector<double> re{r.roots[0].real(), r.roots[1].real()};
  std::sort(re.begin(), re.end());
  EXPECT_NEAR(re[0], 2.0, 1e-9);
  EXPECT_NEAR(re[1], 3.0, 1e-9);

  r = durand_kerner({1.0, 0.0, 1.0});  // s^2 + 1
  for (const auto& z : r.roots) {
    EXPECT_NEAR(z.real(), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(z.imag()), 1.0, 1e-9);
  }
}

TEST(DurandKerner, AgreesWithCompanionEigenvalues) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    Poly p{u(rng), u(rng), u(rng), u(rng), u(rng), 1.0};
    const auto r = durand_kerner(p);
    for (const auto& z : r.roots) EXPECT_LT(std::abs(poly_eval(p, z)), 1e-7);
  }
}

TEST(Jacobi, ReconstructsMatrix) {
  MatrixXd s(3, 3);
  s << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  const auto e = jacobi_eigen(s);
  const MatrixXd back = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
  EXPECT_LT(max_abs(back - s), 1e-12);
  EXPECT_NEAR(e.values(0), 2.0 - std::sqrt(2.0), 1e-12);
}
