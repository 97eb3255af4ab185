#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "clipnorm/analysis.hpp"

using namespace clipnorm;

namespace {

std::vector<double> uniform(std::size_t n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& c : v) c = u(rng);
  return v;
}

}  // namespace

TEST(OneStep, ExactGradientOnQuadratic) {
  const NormedSpace sp = NormedSpace::euclidean(3);
  const std::vector<double> lam{1.0, 2.0, 4.0};
  const ProblemSpec q = make_quadratic(sp, lam, {0, 0, 0}, {0, 0, 0});
  const PrimalVector w(sp, {1.0, -0.5, 0.25});
  const DualVector g = true_gradient(q, w);
  const double gn = dual_norm(g);
  const double eta = gn / 4.0;
  // F(w') = F(w) - eta ||g|| + eta^2/2 g'Ag / ||g||^2, so the slack is
  // eta^2/2 (L - g'Ag / ||g||^2).
  double rayleigh = 0.0;
  for (int i = 0; i < 3; ++i) rayleigh += lam[i] * g[i] * g[i];
  rayleigh /= gn * gn;
  const double expected = 0.5 * eta * eta * (4.0 - rayleigh);
  EXPECT_GE(expected, 0.0);
  EXPECT_NEAR(check_one_step(q, w, g, eta), expected, 1e-12);
}

TEST(OneStep, VanishesAsStepShrinks) {
  const NormedSpace sp(3, 1.5);
  const ProblemSpec c = make_cosine_sum(sp, 1.0, {0.3, 1.0, -2.0});
  const PrimalVector w = c.start();
  const DualVector g = true_gradient(c, w);
  double prev = check_one_step(c, w, g, 1e-1);
  for (double eta : {1e-2, 1e-3, 1e-4}) {
    const double r = check_one_step(c, w, g, eta);
    EXPECT_GE(r, -kResidualTolerance);
    EXPECT_LT(r, prev);
    prev = r;
  }
  EXPECT_LT(prev, 1e-7);
  EXPECT_THROW((void)check_one_step(c, w, g, 0.0), std::invalid_argument);
}

TEST(OneStep, RandomSweepOnCosineSum) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double q : {2.0, 1.5}) {
    const NormedSpace sp(4, q);
    const ProblemSpec c = make_cosine_sum(sp, 1.5, std::vector<double>(4, 0.0));
    for (int i = 0; i < 10000; ++i) {
      const PrimalVector w(sp, uniform(4, -4, 4, rng));
      const DualVector gs(sp, uniform(4, -3, 3, rng));
      const double eta = std::pow(10.0, -3.0 + 3.5 * u(rng));
      ASSERT_GE(check_one_step(c, w, gs, eta), -kResidualTolerance);
    }
  }
}

TEST(SmoothUpper, EqualPointsGiveZero) {
  const NormedSpace sp(3, 1.5);
  const ProblemSpec c = make_cosine_sum(sp, 1.0, {0, 0, 0});
  const PrimalVector x(sp, {0.1, 0.2, 0.3});
  EXPECT_EQ(check_smooth_upper(c, x, x), 0.0);
}

TEST(SmoothUpper, QuadraticClosedForm) {
  const NormedSpace sp = NormedSpace::euclidean(3);
  const std::vector<double> lam{1.0, 2.5, 3.0};
  const ProblemSpec q = make_quadratic(sp, lam, {1, 0, -1}, {0, 0, 0});
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> x = uniform(3, -3, 3, rng), y = uniform(3, -3, 3, rng);
    double expected = 0.0;
    for (int k = 0; k < 3; ++k) expected += 0.5 * (3.0 - lam[k]) * (x[k] - y[k]) * (x[k] - y[k]);
    ASSERT_NEAR(check_smooth_upper(q, PrimalVector(sp, x), PrimalVector(sp, y)), expected,
                1e-11 * (1.0 + expected));
  }
}

TEST(SmoothUpper, CosineSweep) {
  std::mt19937_64 rng(14);
  for (double q : {2.0, 1.5, 1.2}) {
    const NormedSpace sp(5, q);
    const ProblemSpec c = make_cosine_sum(sp, 0.8, std::vector<double>(5, 0.0));
    for (int i = 0; i < 10000; ++i) {
      ASSERT_GE(check_smooth_upper(c, PrimalVector(sp, uniform(5, -5, 5, rng)),
                                   PrimalVector(sp, uniform(5, -5, 5, rng))),
                -kResidualTolerance);
    }
  }
}

TEST(Taylor, QuadraticIsExact) {
  const NormedSpace sp(3, 1.5);
  const ProblemSpec q = make_quadratic(sp, {1, 2, 3}, {0.5, 0, 0}, {0, 0, 0});
  std::mt19937_64 rng(15);
  for (int i = 0; i < 100; ++i) {
    const TaylorResiduals r = check_second_order_taylor(q, PrimalVector(sp, uniform(3, -2, 2, rng)),
                                                        PrimalVector(sp, uniform(3, -2, 2, rng)));
    ASSERT_NEAR(r.value, 0.0, 1e-10);
    ASSERT_NEAR(r.gradient, 0.0, 1e-10);
  }
}

TEST(Taylor, EqualPointsGiveZero) {
  const NormedSpace sp = NormedSpace::euclidean(2);
  const ProblemSpec c = make_cosine_sum(sp, 1.0, {0, 0});
  const PrimalVector x(sp, {0.7, -0.2});
  const TaylorResiduals r = check_second_order_taylor(c, x, x);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.gradient, 0.0);
}

TEST(Taylor, CosineSweep) {
  std::mt19937_64 rng(16);
  for (double q : {2.0, 1.5}) {
    const NormedSpace sp(4, q);
    const ProblemSpec c = make_cosine_sum(sp, 1.3, std::vector<double>(4, 0.0));
    for (int i = 0; i < 10000; ++i) {
      const TaylorResiduals r = check_second_order_taylor(
          c, PrimalVector(sp, uniform(4, -4, 4, rng)), PrimalVector(sp, uniform(4, -4, 4, rng)));
      ASSERT_GE(r.value, -kResidualTolerance);
      ASSERT_GE(r.gradient, -kResidualTolerance);
    }
  }
}

TEST(RateFit, ExactPowerLaw) {
  const std::vector<double> t{1e3, 1e4, 1e5, 1e6};
  std::vector<double> m;
  for (double x : t) m.push_back(7.0 * std::pow(x, -0.25));
  const RateFit f = fit_rate_exponent(t, m);
  EXPECT_NEAR(f.slope, -0.25, 1e-12);
  EXPECT_NEAR(f.stderr_slope, 0.0, 1e-10);
  EXPECT_NEAR(f.intercept, std::log(7.0), 1e-10);
}

TEST(RateFit, ConstantHasZeroSlope) {
  const std::vector<double> t{1e2, 1e3, 1e4};
  const std::vector<double> m(3, 0.4);
  EXPECT_NEAR(fit_rate_exponent(t, m).slope, 0.0, 1e-14);
}

TEST(RateFit, NoisyPowerLawWithinTwoStandardErrors) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<double> t, m;
  for (double e = 2.0; e <= 6.0; e += 0.25) {
    t.push_back(std::pow(10.0, e));
    m.push_back(std::pow(t.back(), -2.0 / 7.0) * std::exp(noise(rng)));
  }
  const RateFit f = fit_rate_exponent(t, m);
  EXPECT_GT(f.stderr_slope, 0.0);
  EXPECT_NEAR(f.slope, -2.0 / 7.0, 2.0 * f.stderr_slope);
}

TEST(RateFit, RejectsDegenerateInput) {
  const std::vector<double> two{1e3, 1e5};
  EXPECT_THROW(fit_rate_exponent(two, two), std::invalid_argument);
  const std::vector<double> narrow{1e3, 3e3, 1e4};
  EXPECT_THROW(fit_rate_exponent(narrow, narrow), std::invalid_argument);
  const std::vector<double> t{1e3, 1e4, 1e5}, bad{1.0, 0.0, 1.0};
  EXPECT_THROW(fit_rate_exponent(t, bad), std::invalid_argument);
  const std::vector<double> shorter{1.0, 1.0};
  EXPECT_THROW(fit_rate_exponent(t, shorter), std::invalid_argument);
}
