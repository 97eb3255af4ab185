#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <random>

#include "clipnorm/concentration.hpp"
#include "clipnorm/concentration_suite.hpp"

using namespace clipnorm;

namespace {

std::vector<DualVector> line(std::initializer_list<double> xs) {
  const NormedSpace sp = NormedSpace::euclidean(1);
  std::vector<DualVector> out;
  for (double x : xs) out.emplace_back(sp, std::vector<double>{x});
  return out;
}

double sum_norm(const std::vector<DualVector>& xs) {
  DualVector s = DualVector::zeros(xs.front().space());
  for (const DualVector& x : xs) s = s + x;
  return dual_norm(s);
}

}  // namespace

TEST(SSequence, ZerosGiveZeros) {
  const NormedSpace sp = NormedSpace::euclidean(3);
  const std::vector<DualVector> xs(5, DualVector::zeros(sp));
  for (double s : s_sequence(xs)) EXPECT_EQ(s, 0.0);
  for (double s : s_sequence(xs, SignAtZero::zero)) EXPECT_EQ(s, 0.0);
  EXPECT_EQ(s_sequence_majorant(xs), 0.0);
}

TEST(SSequence, HandTrace) {
  const std::vector<DualVector> xs = line({1.0, -2.0, 3.0});
  // sign(0) = 0 kills every term.
  const std::vector<double> z = s_sequence(xs, SignAtZero::zero);
  EXPECT_EQ(z, (std::vector<double>{0.0, 0.0, 0.0}));
  // sign(0) = +1: s_2 = <-2, d(1)> = -2, then sign(-2) <3, d(-1)> = 3.
  const std::vector<double> p = s_sequence(xs);
  EXPECT_DOUBLE_EQ(p[0], 0.0);
  EXPECT_DOUBLE_EQ(p[1], -2.0);
  EXPECT_DOUBLE_EQ(p[2], 3.0);
  EXPECT_DOUBLE_EQ(s_sequence_majorant(xs), 1.0 + std::sqrt(23.0));
  EXPECT_DOUBLE_EQ(s_sequence_majorant(xs, SignAtZero::zero), std::sqrt(23.0));
  EXPECT_GE(s_sequence_majorant(xs), sum_norm(xs));
}

TEST(SSequence, ZeroConventionBreaksMajorantOnConstantStream) {
  // X_t = 1 for 20 steps: s stays 0, the root term is sqrt(1 + 20) < 20.
  std::vector<DualVector> xs = line({});
  const NormedSpace sp = NormedSpace::euclidean(1);
  for (int i = 0; i < 20; ++i) xs.emplace_back(sp, std::vector<double>{1.0});
  EXPECT_LT(s_sequence_majorant(xs, SignAtZero::zero), sum_norm(xs));
  EXPECT_GE(s_sequence_majorant(xs), sum_norm(xs));
}

TEST(SSequence, IncrementBoundedByNorm) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  const NormedSpace sp = NormedSpace::euclidean(4);
  std::vector<DualVector> xs;
  for (int i = 0; i < 100000; ++i) {
    std::vector<double> v(4);
    for (double& c : v) c = g(rng);
    xs.emplace_back(sp, v);
  }
  const std::vector<double> s = s_sequence(xs);
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const double n = dual_norm(xs[t]);
    ASSERT_LE(std::abs(s[t]), n + 1e-9 * (1.0 + n));
  }
}

TEST(SSequence, SingleVectorMajorant) {
  const NormedSpace sp(3, 1.5);  // dual l_3, C = 2
  const std::vector<DualVector> xs{DualVector(sp, {1.0, -2.0, 0.5})};
  const double n = dual_norm(xs[0]);
  EXPECT_NEAR(s_sequence_majorant(xs), std::sqrt(3.0) * n, 1e-14 * n);
}

TEST(SSequence, MajorantSweepDualL3) {
  const MajorantSweep r = majorant_sweep(NormedSpace::from_dual_exponent(5, 3.0), 50, 10000, 3);
  EXPECT_EQ(r.streams, 10000);
  EXPECT_EQ(r.s_bound_violations, 0);
  EXPECT_EQ(r.majorant_violations, 0);
  EXPECT_GE(r.worst_margin, 0.0);
}

TEST(Freedman, ScalarValues) {
  const std::vector<double> s2(100, 1.0);
  const double l = std::log(20.0);
  EXPECT_NEAR(freedman_scalar_bound(1.0, s2, 0.05), 2.0 * l / 3.0 + std::sqrt(200.0 * l), 1e-12);
  EXPECT_NEAR(freedman_scalar_bound(1.0, s2, 0.05), 26.475, 1e-3);
  EXPECT_LT(freedman_scalar_bound(1.0, s2, 1.0 - 1e-12), 1e-4);
  EXPECT_THROW((void)freedman_scalar_bound(1.0, s2, 0.0), std::invalid_argument);
  EXPECT_THROW((void)freedman_scalar_bound(1.0, s2, 1.0), std::invalid_argument);
}

TEST(Freedman, HilbertValues) {
  const std::vector<double> s(100, 1.0);
  EXPECT_NEAR(freedman_hilbert_bound(1.0, s, std::exp(-1.0)), 33.0, 1e-12);
  const std::vector<double> zero(10, 0.0);
  EXPECT_DOUBLE_EQ(freedman_hilbert_bound(2.0, zero, 0.01), 6.0 * std::log(100.0));
  EXPECT_DOUBLE_EQ(freedman_hilbert_bound(2.0, zero, 0.9), 6.0);
}

TEST(Freedman, BanachValues) {
  const std::vector<double> zero(10, 0.0);
  EXPECT_DOUBLE_EQ(freedman_banach_bound(1.0, zero, 0.01, 2.0, 1.5), 10.0 * std::log(300.0));
  EXPECT_THROW((void)freedman_banach_bound(1.0, zero, 0.1, 0.5, 2.0), std::invalid_argument);
  EXPECT_THROW((void)freedman_banach_bound(1.0, zero, 0.1, 1.0, 2.5), std::invalid_argument);
}

TEST(Freedman, BanachWithUnitConstantDominatesHilbert) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double r = 0.1 + 5.0 * u(rng);
    std::vector<double> s(1 + i % 50);
    for (double& x : s) x = r * u(rng);
    const double delta = std::pow(10.0, -4.0 * u(rng)) * 0.999;
    ASSERT_GE(freedman_banach_bound(r, s, delta, 1.0, 2.0), freedman_hilbert_bound(r, s, delta));
  }
}

TEST(Freedman, MonotoneInArguments) {
  const std::vector<double> a(20, 0.5), b(20, 0.8);
  EXPECT_LE(freedman_scalar_bound(1.0, a, 0.1), freedman_scalar_bound(2.0, a, 0.1));
  EXPECT_LE(freedman_scalar_bound(1.0, a, 0.1), freedman_scalar_bound(1.0, b, 0.1));
  EXPECT_LE(freedman_scalar_bound(1.0, a, 0.1), freedman_scalar_bound(1.0, a, 0.01));
  EXPECT_LE(freedman_hilbert_bound(1.0, a, 0.1), freedman_hilbert_bound(1.0, b, 0.01));
  EXPECT_LE(freedman_banach_bound(1.0, a, 0.1, 2.0, 1.5),
            freedman_banach_bound(1.0, b, 0.1, 3.0, 1.5));
}

TEST(TruncatedSum, HandValue) {
  WeightedStreamSpec spec;
  spec.weights = {1.0};
  spec.moment_bounds = {1.0};
  spec.tau = 1.0;
  spec.moment_index = 1.5;
  spec.delta = 3.0 / std::exp(1.0);
  EXPECT_NEAR(truncated_sum_bound(spec, TruncationVariant::hilbert), 7.0, 1e-12);
}

TEST(TruncatedSum, LargeTauShape) {
  WeightedStreamSpec spec;
  spec.weights = {1.0};
  spec.moment_bounds = {1.0};
  spec.moment_index = 2.0;
  spec.delta = 0.1;
  spec.tau = 1e6;
  const double a = truncated_sum_bound(spec, TruncationVariant::hilbert);
  spec.tau = 2e6;
  const double b = truncated_sum_bound(spec, TruncationVariant::hilbert);
  EXPECT_NEAR(b / a, 2.0, 1e-5);
  EXPECT_LT(truncation_bias_bound(1.0, 1e6, 2.0), 1e-5);
}

TEST(TruncatedSum, BanachExceedsHilbertAtUnitConstant) {
  WeightedStreamSpec spec;
  spec.weights = {0.5, 0.7, 1.0};
  spec.moment_bounds = {1.0, 2.0, 1.5};
  spec.tau = 4.0;
  spec.moment_index = 1.5;
  spec.delta = 0.05;
  EXPECT_GE(truncated_sum_bound(spec, TruncationVariant::banach),
            truncated_sum_bound(spec, TruncationVariant::hilbert));
}

TEST(Truncation, BoundedSamplerHasNoBias) {
  Rng rng(5);
  const VectorSampler s = [](Rng& r) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return std::vector<double>{u(r), u(r)};
  };
  const std::vector<double> mean{0.0, 0.0};
  const BiasVariance bv = truncation_bias_variance_mc(s, mean, 2.0, 100000, rng);
  EXPECT_LE(bv.bias, 4.0 * bv.bias_stderr);
  EXPECT_NEAR(bv.variance, 2.0 / 3.0, 4.0 * bv.variance_stderr);
}

namespace {

VectorSampler symmetric_pareto(double a) {
  return [a](Rng& r) {
    const double x = sample_pareto_radius(a, 1.0, r);
    std::bernoulli_distribution coin(0.5);
    return std::vector<double>{coin(r) ? x : -x};
  };
}

}  // namespace

TEST(Truncation, ParetoWithinBounds) {
  Rng rng(6);
  const std::vector<double> mean{0.0};
  const double g = std::pow(pareto_moment(1.8, 1.0, 1.5), 1.0 / 1.5);
  const BiasVariance bv = truncation_bias_variance_mc(symmetric_pareto(1.8), mean, 10.0, 200000, rng);
  EXPECT_NEAR(truncation_bias_bound(g, 10.0, 1.5), 6.0 / std::sqrt(10.0), 1e-12);
  EXPECT_NEAR(truncation_variance_bound(g, 10.0, 1.5), 6.0 * std::sqrt(10.0), 1e-11);
  EXPECT_LE(bv.bias, truncation_bias_bound(g, 10.0, 1.5) + 3.0 * bv.bias_stderr);
  EXPECT_LE(bv.variance, truncation_variance_bound(g, 10.0, 1.5) + 3.0 * bv.variance_stderr);
}

TEST(Truncation, BiasDecreasesInTau) {
  // One-sided Pareto: the symmetric case has zero bias at every tau.
  const VectorSampler s = [](Rng& r) { return std::vector<double>{sample_pareto_radius(1.8, 1.0, r)}; };
  const std::vector<double> mean{1.8 / 0.8};
  double prev = std::numeric_limits<double>::infinity();
  for (double tau : {2.0, 5.0, 10.0, 20.0, 50.0}) {
    Rng rng(7);
    const BiasVariance bv = truncation_bias_variance_mc(s, mean, tau, 200000, rng);
    EXPECT_LT(bv.bias, prev) << "tau = " << tau;
    prev = bv.bias;
  }
}

TEST(Truncation, RejectsTooFewTrials) {
  Rng rng(1);
  const std::vector<double> mean{0.0};
  EXPECT_THROW(truncation_bias_variance_mc(symmetric_pareto(1.8), mean, 1.0, 99999, rng),
               std::invalid_argument);
}

TEST(Coverage, InfiniteBoundCoversEverything) {
  const CoverageResult r = coverage_test(
      [](std::size_t) { return std::numeric_limits<double>::infinity(); },
      [](Rng& rng) { return std::vector<double>{std::normal_distribution<double>()(rng)}; }, 1000,
      0.9, 1);
  EXPECT_EQ(r.coverage, 1.0);
  EXPECT_TRUE(r.pass());
}

TEST(Coverage, CoinFlipFreedman) {
  const std::size_t n = 100;
  const double delta = 0.1;
  const CoverageResult r = coverage_test(
      [&](std::size_t k) {
        const std::vector<double> s2(k, 1.0);
        return freedman_scalar_bound(1.0, s2, delta);
      },
      [&](Rng& rng) {
        std::bernoulli_distribution coin(0.5);
        std::vector<double> dev(n);
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) dev[k] = (s += coin(rng) ? 1.0 : -1.0);
        return dev;
      },
      10000, 1.0 - delta, 2);
  EXPECT_TRUE(r.pass()) << r.coverage;
}

TEST(Coverage, SuitePasses) {
  CoverageSuiteParams p;
  p.trials = 4000;
  for (const LemmaCoverage& row : run_coverage_suite(p)) {
    EXPECT_TRUE(row.result.pass()) << row.lemma << " " << row.result.coverage;
  }
}

TEST(Coverage, CsvHeader) {
  CoverageSuiteParams p;
  p.trials = 1000;
  p.length = 10;
  const std::string csv = coverage_csv({scalar_freedman_coverage(p)});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "lemma,delta,trials,coverage,ci_low,ci_high,pass");
}

TEST(Coverage, ThreadCountDoesNotChangeResult) {
  CoverageSuiteParams p;
  p.trials = 2000;
  p.length = 30;
  setenv("CLIPNORM_THREADS", "1", 1);
  const LemmaCoverage a = banach_freedman_coverage(p);
  setenv("CLIPNORM_THREADS", "3", 1);
  const LemmaCoverage b = banach_freedman_coverage(p);
  unsetenv("CLIPNORM_THREADS");
  EXPECT_EQ(a.result.coverage, b.result.coverage);
}

TEST(Wilson, Interval) {
  const Interval all = wilson_interval(100, 100);
  EXPECT_EQ(all.high, 1.0);
  EXPECT_LT(all.low, 1.0);
  const Interval half = wilson_interval(50, 100);
  EXPECT_NEAR(half.low + half.high, 1.0, 1e-12);
  EXPECT_NEAR(half.high - 0.5, 0.0963, 1e-3);
  EXPECT_THROW((void)wilson_interval(0, 0), std::invalid_argument);
}

TEST(PowerMean, Examples) {
  EXPECT_NEAR(power_mean_check(std::vector<double>{1.0, 1.0}, 1.0, 2.0), 2.0 - std::sqrt(2.0),
              1e-15);
  EXPECT_NEAR(power_mean_check(std::vector<double>{3.7}, 1.2, 1.9), 0.0, 1e-15);
  EXPECT_NEAR(power_mean_check(std::vector<double>{1.0, 2.0, 3.0}, 1.5, 1.5), 0.0, 1e-15);
  EXPECT_THROW((void)power_mean_check(std::vector<double>{1.0, 0.0}, 1.0, 2.0),
               std::invalid_argument);
  EXPECT_THROW((void)power_mean_check(std::vector<double>{1.0}, 2.0, 1.0), std::invalid_argument);
}

TEST(PowerMean, RandomTuples) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    std::vector<double> xs(1 + i % 8);
    for (double& x : xs) x = std::exp(10.0 * (u(rng) - 0.5));
    const double p = 0.1 + 2.0 * u(rng);
    const double q = p + 2.0 * u(rng);
    ASSERT_GE(power_mean_check(xs, p, q), -1e-12);
  }
}

TEST(ClippedPareto, SecondMomentMatchesIntegral) {
  // a = 3 is finite: E min(R, c)^2 -> 3 as c grows.
  EXPECT_NEAR(clipped_pareto_second_moment(3.0, 1.0, 1e9), 3.0, 1e-6);
  EXPECT_DOUBLE_EQ(clipped_pareto_second_moment(1.8, 1.0, 1.0), 1.0);
  EXPECT_THROW((void)clipped_pareto_second_moment(1.8, 2.0, 1.0), std::invalid_argument);
}
