#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "clipnorm/normed_space.hpp"
#include "clipnorm/problems.hpp"

namespace clipnorm {

// -- s-sequence reduction -------------------------------------------------
//
// s_t = sign(sum_{i<t} s_i) <grad ||S||^2, X_t> / (2 ||S||),  S = sum_{i<t} X_i,
// with s_t = 0 whenever S = 0.  The norm is the (2, C)-smooth dual norm of
// the vectors' space.

enum class SignAtZero {
  positive,  // sign(0) = +1; needed for the majorant to hold
  zero,      // sign(0) = 0; collapses the sequence to zeros
};

std::vector<double> s_sequence(std::span<const DualVector> xs,
                               SignAtZero convention = SignAtZero::positive);

// |sum s_t| + (max ||X_t||^2 + C sum ||X_t||^2)^(1/2), an upper bound on
// ||sum X_t||.
double s_sequence_majorant(std::span<const DualVector> xs,
                           SignAtZero convention = SignAtZero::positive);

// -- Freedman-type bounds ------------------------------------------------

// 2 R log(1/delta) / 3 + sqrt(2 sum sigma_t^2 log(1/delta)); sigma_sq holds
// the variances.  Holds with probability 1 - delta.
double freedman_scalar_bound(double r, std::span<const double> sigma_sq, double delta);

// 3 R max(1, log(1/delta)) + 3 sqrt(sum sigma_t^2 max(1, log(1/delta))).
// Holds with probability 1 - 3 delta; the caller owns the factor of 3.
double freedman_hilbert_bound(double r, std::span<const double> sigma, double delta);

// 5 C R max(1, log(3/delta)) + 4 (C sum sigma_t^p)^(1/p) sqrt(max(1, log(3/delta))).
// Requires C >= 1 and p in (1, 2].
double freedman_banach_bound(double r, std::span<const double> sigma, double delta, double c,
                             double p);

// -- Truncated heavy-tailed sums -----------------------------------------

struct WeightedStreamSpec {
  std::vector<double> weights;        // b_t in (0, 1]
  std::vector<double> moment_bounds;  // G_t > 0
  double tau;
  double moment_index;                // p-moment exponent in (1, 2]
  double delta;
  double smooth_c = 1.0;              // Banach variant
};

enum class TruncationVariant { hilbert, banach };

// Bound on ||sum b_t (Xhat_t - mu_t)|| with Xhat_t the tau-truncation of X_t.
// Each variant uses the constants of its own statement.
double truncated_sum_bound(const WeightedStreamSpec& spec, TruncationVariant variant);

struct BiasVariance {
  double bias;            // ||E Xhat - mu||
  double bias_stderr;
  double variance;        // E ||Xhat - E Xhat||^2
  double variance_stderr;
  std::int64_t trials;
};

// Draws one sample of X; returns its coordinates.
using VectorSampler = std::function<std::vector<double>(Rng&)>;

// Monte-Carlo estimate of the truncation bias and variance in the Euclidean
// norm.  `mean` is the known mean mu of the untruncated X.  trials >= 1e5.
BiasVariance truncation_bias_variance_mc(const VectorSampler& sampler,
                                         std::span<const double> mean, double tau,
                                         std::int64_t trials, Rng& rng);

double truncation_bias_bound(double g, double tau, double moment_index);
double truncation_variance_bound(double g, double tau, double moment_index);

// -- Coverage -------------------------------------------------------------

struct Interval {
  double low;
  double high;
};

// Wilson score interval for k successes out of n at 95%.
Interval wilson_interval(std::int64_t successes, std::int64_t trials);

struct CoverageResult {
  double coverage;
  Interval ci;
  std::int64_t trials;
  double level;  // required coverage
  // The required level lies at or below the upper end of the 95% band.
  bool pass() const { return ci.high >= level; }
};

// A stream generator returns realized deviations after each prefix k = 1..n.
using StreamGenerator = std::function<std::vector<double>(Rng&)>;
// bound_fn(k) is the bound for the first k terms (k is 1-based).
using PrefixBound = std::function<double(std::size_t)>;

// Fraction of independent streams with deviation_k <= bound_fn(k) for every
// prefix k.  Each trial gets its own generator seeded from `seed`.
CoverageResult coverage_test(const PrefixBound& bound_fn, const StreamGenerator& stream,
                             std::int64_t trials, double level, std::uint64_t seed);

// (sum x^q)^(1/q) <= (sum x^p)^(1/p) for 0 < p <= q; returns RHS - LHS.
double power_mean_check(std::span<const double> xs, double p, double q);

// E[min(R, c)^2] for R ~ Pareto(a, x_m) and c >= x_m.
double clipped_pareto_second_moment(double tail_index, double scale, double clip);

}  // namespace clipnorm
