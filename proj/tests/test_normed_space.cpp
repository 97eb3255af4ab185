#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "clipnorm/normed_space.hpp"

using namespace clipnorm;

namespace {

// Dual l_{1.5} on R^2 (primal l_3).
NormedSpace dual15() { return NormedSpace::from_dual_exponent(2, 1.5); }

std::vector<double> gaussian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (double& c : v) c = g(rng);
  return v;
}

}  // namespace

TEST(NormedSpace, ExponentsAreConjugate) {
  const NormedSpace sp(3, 1.5);
  EXPECT_DOUBLE_EQ(sp.dual_exponent(), 3.0);
  EXPECT_DOUBLE_EQ(1.0 / sp.primal_exponent() + 1.0 / sp.dual_exponent(), 1.0);
  EXPECT_EQ(NormedSpace::smooth_p(), 2.0);
  EXPECT_DOUBLE_EQ(sp.smooth_constant(), 2.0);
  EXPECT_DOUBLE_EQ(NormedSpace::euclidean(4).smooth_constant(), 1.0);
}

TEST(NormedSpace, RejectsDegenerateExponents) {
  EXPECT_THROW(NormedSpace(2, 1.0), std::invalid_argument);
  EXPECT_THROW(NormedSpace(2, std::numeric_limits<double>::infinity()), std::invalid_argument);
  EXPECT_THROW(NormedSpace(0, 2.0), std::invalid_argument);
}

TEST(NormedSpace, NonSmoothDualHasNoConstant) {
  EXPECT_FALSE(dual15().dual_is_smooth());
  EXPECT_THROW((void)dual15().smooth_constant(), std::domain_error);
}

TEST(Vectors, RejectNonFiniteAndWrongSize) {
  const NormedSpace sp = NormedSpace::euclidean(2);
  EXPECT_THROW(DualVector(sp, {1.0, std::nan("")}), std::domain_error);
  EXPECT_THROW(PrimalVector(sp, {1.0, std::numeric_limits<double>::infinity()}), std::domain_error);
  EXPECT_THROW(DualVector(sp, {1.0}), std::invalid_argument);
}

TEST(Vectors, MismatchedSpacesCannotPair) {
  const DualVector v(NormedSpace::euclidean(2), {1.0, 2.0});
  const PrimalVector w(NormedSpace(2, 1.5), {1.0, 2.0});
  EXPECT_THROW((void)pairing(v, w), std::invalid_argument);
  const DualVector u(NormedSpace::euclidean(3), {1.0, 2.0, 3.0});
  EXPECT_THROW((void)(v + u), std::invalid_argument);
}

TEST(PrimalNorm, Examples) {
  EXPECT_DOUBLE_EQ(primal_norm(PrimalVector(NormedSpace::euclidean(2), {3.0, 4.0})), 5.0);
  EXPECT_EQ(primal_norm(PrimalVector::zeros(NormedSpace(3, 1.3))), 0.0);
  EXPECT_NEAR(primal_norm(PrimalVector(NormedSpace(2, 4.0), {1.0, 1.0})), 1.189207115002721,
              1e-15);
}

TEST(PrimalNorm, MaxFactoringAvoidsOverflow) {
  const PrimalVector w(NormedSpace(2, 1.5), {1e300, 1e300});
  EXPECT_NEAR(primal_norm(w) / 1e300, std::pow(2.0, 1.0 / 1.5), 1e-14);
}

TEST(DualNorm, Examples) {
  EXPECT_DOUBLE_EQ(dual_norm(DualVector(NormedSpace::euclidean(2), {3.0, 4.0})), 5.0);
  EXPECT_EQ(dual_norm(DualVector::zeros(dual15())), 0.0);
  const double expected = std::pow(1.0 + std::pow(8.0, 1.5), 2.0 / 3.0);
  const DualVector v(dual15(), {1.0, 8.0});
  EXPECT_NEAR(dual_norm(v), expected, 1e-13);
  EXPECT_NEAR(dual_norm(v), 8.2340, 5e-5);
}

TEST(DualNorm, MatchesNumericSupremum) {
  // sup over the primal unit sphere of l_3, parametrized by angle.
  const DualVector v(dual15(), {1.0, 8.0});
  double best = 0.0;
  const int n = 2000000;
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * M_PI * i / n;
    const std::vector<double> x{std::cos(th), std::sin(th)};
    const double nx = lp_norm(x, 3.0);
    best = std::max(best, (v[0] * x[0] + v[1] * x[1]) / nx);
  }
  EXPECT_NEAR(best, dual_norm(v), 1e-9);
}

TEST(DualityMap, Examples) {
  const PrimalVector d = duality_map(DualVector(NormedSpace::euclidean(2), {0.0, 5.0}));
  EXPECT_EQ(d[0], 0.0);
  EXPECT_DOUBLE_EQ(d[1], 1.0);
  EXPECT_TRUE(duality_map(DualVector::zeros(dual15())).is_zero());

  const DualVector v(dual15(), {1.0, 8.0});
  const PrimalVector dv = duality_map(v);
  const double nv = dual_norm(v);
  EXPECT_NEAR(dv[0], 1.0 / std::sqrt(nv), 1e-15);
  EXPECT_NEAR(dv[1], std::sqrt(8.0) / std::sqrt(nv), 1e-15);
  EXPECT_NEAR(std::pow(std::pow(dv[0], 3) + std::pow(dv[1], 3), 1.0 / 3.0), 1.0, 1e-10);
  EXPECT_NEAR(dv[0] * 1.0 + dv[1] * 8.0, nv, 1e-10 * nv);
}

TEST(DualityMap, ContractHoldsAcrossExponents) {
  std::mt19937_64 rng(11);
  for (double r : {1.2, 1.5, 2.0}) {
    const NormedSpace sp = NormedSpace::from_dual_exponent(7, r);
    for (int i = 0; i < 20000; ++i) {
      const DualVector v(sp, gaussian(7, rng));
      const PrimalVector d = duality_map(v);
      const double nv = dual_norm(v);
      ASSERT_NEAR(primal_norm(d), 1.0, 1e-10);
      ASSERT_NEAR(pairing(v, d), nv, 1e-10 * nv);
    }
  }
}

TEST(ClipDual, Examples) {
  const NormedSpace e2 = NormedSpace::euclidean(2);
  const DualVector c = clip_dual(DualVector(e2, {3.0, 4.0}), 2.0);
  EXPECT_NEAR(c[0], 1.2, 1e-15);
  EXPECT_NEAR(c[1], 1.6, 1e-15);
  const DualVector small(e2, {0.3, 0.4});
  EXPECT_TRUE(clip_dual(small, 2.0) == small);

  const DualVector v(dual15(), {1.0, 8.0});
  const DualVector cv = clip_dual(v, 4.0);
  const double scale = 4.0 / dual_norm(v);
  EXPECT_NEAR(cv[0], scale, 1e-14);
  EXPECT_NEAR(cv[1], 8.0 * scale, 1e-14);
  EXPECT_NEAR(dual_norm(cv), 4.0, 4e-12);
}

TEST(ClipDual, RejectsNonPositiveTau) {
  const DualVector v(dual15(), {1.0, 8.0});
  EXPECT_THROW((void)clip_dual(v, 0.0), std::invalid_argument);
  EXPECT_THROW((void)clip_dual(v, -1.0), std::invalid_argument);
}

TEST(ClipDual, IdempotentAndNormPreserving) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (double r : {2.0, 3.0, 1.5}) {
    const NormedSpace sp = NormedSpace::from_dual_exponent(6, r);
    for (int i = 0; i < 20000; ++i) {
      std::vector<double> x = gaussian(6, rng);
      const double s = std::pow(10.0, u(rng));
      for (double& c : x) c *= s;
      const DualVector v(sp, x);
      const double tau = std::pow(10.0, u(rng));
      const DualVector c = clip_dual(v, tau);
      ASSERT_TRUE(clip_dual(c, tau) == c);
      ASSERT_NEAR(dual_norm(c), std::min(tau, dual_norm(v)), 1e-12 * std::min(tau, dual_norm(v)));
    }
  }
}

TEST(Holder, PairingBoundedByNorms) {
  std::mt19937_64 rng(9);
  for (double q : {1.2, 1.5, 2.0}) {
    const NormedSpace sp(5, q);
    for (int i = 0; i < 10000; ++i) {
      const DualVector v(sp, gaussian(5, rng));
      const PrimalVector w(sp, gaussian(5, rng));
      ASSERT_LE(pairing(v, w), dual_norm(v) * primal_norm(w) + 1e-9);
    }
  }
}

TEST(SmoothNorm, ZeroPerturbationIsExact) {
  const NormedSpace sp = NormedSpace::from_dual_exponent(3, 3.0);
  const DualVector x(sp, {1.0, -2.0, 0.5});
  EXPECT_EQ(verify_smooth_norm(x, DualVector::zeros(sp)), 0.0);
}

TEST(SmoothNorm, EuclideanIsTight) {
  std::mt19937_64 rng(3);
  const NormedSpace sp = NormedSpace::euclidean(4);
  for (int i = 0; i < 1000; ++i) {
    const DualVector x(sp, gaussian(4, rng));
    const DualVector y(sp, gaussian(4, rng));
    ASSERT_NEAR(verify_smooth_norm(x, y), 0.0, 1e-12);
  }
}

TEST(SmoothNorm, PrimalL15SweepHasNoViolations) {
  // Primal l_1.5, dual l_3, C = 2.
  std::mt19937_64 rng(17);
  const NormedSpace sp(5, 1.5);
  ASSERT_DOUBLE_EQ(sp.smooth_constant(), 2.0);
  for (int i = 0; i < 10000; ++i) {
    const DualVector x(sp, gaussian(5, rng));
    const DualVector y(sp, gaussian(5, rng));
    ASSERT_GE(verify_smooth_norm(x, y), -1e-9);
  }
}

TEST(SmoothNorm, DualBelowTwoIsNotSmooth) {
  // For r < 2, ||x + y||^2 grows like eps^r along a coordinate orthogonal to
  // x while the right-hand side grows like eps^2, so no constant C works.
  const NormedSpace sp = dual15();
  const DualVector x(sp, {1.0, 0.0});
  const DualVector y(sp, {0.0, 1e-8});
  EXPECT_LT(verify_smooth_norm(x, y, 100.0), -1e-12);
}

TEST(GradSquaredNorm, MatchesFiniteDifference) {
  const NormedSpace sp = NormedSpace::from_dual_exponent(3, 3.0);
  const std::vector<double> x{0.7, -1.3, 0.2};
  const PrimalVector g = grad_squared_dual_norm(DualVector(sp, x));
  const double h = 1e-6;
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<double> a = x, b = x;
    a[i] += h;
    b[i] -= h;
    const double fd = (std::pow(lp_norm(a, 3.0), 2) - std::pow(lp_norm(b, 3.0), 2)) / (2 * h);
    EXPECT_NEAR(g[i], fd, 1e-7);
  }
  EXPECT_TRUE(grad_squared_dual_norm(DualVector::zeros(sp)).is_zero());
}
