#include "clipnorm/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "clipnorm/parallel.hpp"

namespace clipnorm {

std::vector<double> s_sequence(std::span<const DualVector> xs, SignAtZero convention) {
  std::vector<double> s;
  s.reserve(xs.size());
  if (xs.empty()) return s;
  DualVector prefix = DualVector::zeros(xs.front().space());
  double s_sum = 0.0;
  for (const DualVector& x : xs) {
    double st = 0.0;
    if (!prefix.is_zero()) {
      double sign = 1.0;
      if (s_sum < 0.0) {
        sign = -1.0;
      } else if (s_sum == 0.0 && convention == SignAtZero::zero) {
        sign = 0.0;
      }
      // <grad ||S||^2, X> / (2 ||S||) = <X, d(S)>
      st = sign * pairing(x, duality_map(prefix));
    }
    s.push_back(st);
    s_sum += st;
    prefix = prefix + x;
  }
  return s;
}

double s_sequence_majorant(std::span<const DualVector> xs, SignAtZero convention) {
  if (xs.empty()) return 0.0;
  const double c = xs.front().space().smooth_constant();
  const std::vector<double> s = s_sequence(xs, convention);
  double max_sq = 0.0;
  double sum_sq = 0.0;
  for (const DualVector& x : xs) {
    const double n = dual_norm(x);
    max_sq = std::max(max_sq, n * n);
    sum_sq += n * n;
  }
  const double s_total = std::accumulate(s.begin(), s.end(), 0.0);
  return std::abs(s_total) + std::sqrt(max_sq + c * sum_sq);
}

namespace {

void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

void require_nonnegative(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!(x >= 0.0)) throw std::invalid_argument(std::string(what) + " must be non-negative");
  }
}

}  // namespace

double freedman_scalar_bound(double r, std::span<const double> sigma_sq, double delta) {
  require_delta(delta);
  require_nonnegative(sigma_sq, "variances");
  const double l = std::log(1.0 / delta);
  const double v = std::accumulate(sigma_sq.begin(), sigma_sq.end(), 0.0);
  return 2.0 * r * l / 3.0 + std::sqrt(2.0 * v * l);
}

double freedman_hilbert_bound(double r, std::span<const double> sigma, double delta) {
  require_delta(delta);
  require_nonnegative(sigma, "sigma");
  const double l = std::max(1.0, std::log(1.0 / delta));
  double v = 0.0;
  for (double s : sigma) v += s * s;
  return 3.0 * r * l + 3.0 * std::sqrt(v * l);
}

double freedman_banach_bound(double r, std::span<const double> sigma, double delta, double c,
                             double p) {
  require_delta(delta);
  require_nonnegative(sigma, "sigma");
  if (!(c >= 1.0)) throw std::invalid_argument("freedman_banach_bound: C must be >= 1");
  if (!(p > 1.0 && p <= 2.0)) throw std::invalid_argument("freedman_banach_bound: p must lie in (1, 2]");
  const double l = std::max(1.0, std::log(3.0 / delta));
  double v = 0.0;
  for (double s : sigma) v += std::pow(s, p);
  return 5.0 * c * r * l + 4.0 * std::pow(c * v, 1.0 / p) * std::sqrt(l);
}

double truncated_sum_bound(const WeightedStreamSpec& spec, TruncationVariant variant) {
  // Only log(3 / delta) > 0 is needed here.
  if (!(spec.delta > 0.0 && spec.delta < 3.0)) {
    throw std::invalid_argument("truncated_sum_bound: delta must lie in (0, 3)");
  }
  if (spec.weights.size() != spec.moment_bounds.size()) {
    throw std::invalid_argument("truncated_sum_bound: weights and moment bounds differ in length");
  }
  if (!(spec.tau > 0.0)) throw std::invalid_argument("truncated_sum_bound: tau must be positive");
  const double mp = spec.moment_index;
  if (!(mp > 1.0 && mp <= 2.0)) throw std::invalid_argument("truncated_sum_bound: moment index must lie in (1, 2]");
  double big_b = 0.0;
  double bias = 0.0;
  double var = 0.0;
  for (std::size_t t = 0; t < spec.weights.size(); ++t) {
    const double b = spec.weights[t];
    const double g = spec.moment_bounds[t];
    if (!(b > 0.0 && b <= 1.0)) throw std::invalid_argument("truncated_sum_bound: weights must lie in (0, 1]");
    if (!(g > 0.0)) throw std::invalid_argument("truncated_sum_bound: moment bounds must be positive");
    big_b = std::max(big_b, b);
    const double gp = std::pow(g, mp);
    bias += b * gp / std::pow(spec.tau, mp - 1.0);
    var += b * b * gp * std::pow(spec.tau, 2.0 - mp);
  }
  const double l3 = std::log(3.0 / spec.delta);
  const double lm = std::max(1.0, l3);
  if (variant == TruncationVariant::hilbert) {
    return 4.0 * big_b * spec.tau * l3 + bias + 2.0 * std::sqrt(var * lm);
  }
  if (!(spec.smooth_c >= 1.0)) throw std::invalid_argument("truncated_sum_bound: C must be >= 1");
  return 10.0 * spec.smooth_c * big_b * spec.tau * lm + bias +
         4.0 * std::sqrt(spec.smooth_c * var) * std::sqrt(lm);
}

double truncation_bias_bound(double g, double tau, double moment_index) {
  return std::pow(g, moment_index) / std::pow(tau, moment_index - 1.0);
}

double truncation_variance_bound(double g, double tau, double moment_index) {
  return std::pow(g, moment_index) * std::pow(tau, 2.0 - moment_index);
}

BiasVariance truncation_bias_variance_mc(const VectorSampler& sampler,
                                         std::span<const double> mean, double tau,
                                         std::int64_t trials, Rng& rng) {
  if (trials < 100000) throw std::invalid_argument("truncation_bias_variance_mc: need >= 1e5 trials");
  if (!(tau > 0.0)) throw std::invalid_argument("truncation_bias_variance_mc: tau must be positive");
  const std::size_t dim = mean.size();
  std::vector<std::vector<double>> samples(static_cast<std::size_t>(trials));
  std::vector<double> avg(dim, 0.0);
  for (auto& x : samples) {
    x = sampler(rng);
    if (x.size() != dim) throw std::invalid_argument("sampler dimension does not match the mean");
    const double n = lp_norm(x, 2.0);
    if (n > tau) {
      for (double& c : x) c *= tau / n;
    }
    for (std::size_t i = 0; i < dim; ++i) avg[i] += x[i];
  }
  const double n = static_cast<double>(trials);
  for (double& c : avg) c /= n;

  BiasVariance out{};
  out.trials = trials;
  std::vector<double> diff(dim);
  for (std::size_t i = 0; i < dim; ++i) diff[i] = avg[i] - mean[i];
  out.bias = lp_norm(diff, 2.0);

  // Standard error of the bias: per-coordinate sample variance of Xhat / n,
  // combined along the bias direction.
  double sq_mean = 0.0;
  double sq_m2 = 0.0;
  std::vector<double> coord_m2(dim, 0.0);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    double sq = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double d = samples[k][i] - avg[i];
      sq += d * d;
      coord_m2[i] += d * d;
    }
    const double delta = sq - sq_mean;
    sq_mean += delta / static_cast<double>(k + 1);
    sq_m2 += delta * (sq - sq_mean);
  }
  out.variance = sq_mean;
  out.variance_stderr = std::sqrt(sq_m2 / (n - 1.0) / n);
  double bias_var = 0.0;
  for (double m2 : coord_m2) bias_var += m2 / (n - 1.0) / n;
  out.bias_stderr = std::sqrt(bias_var);
  return out;
}

Interval wilson_interval(std::int64_t successes, std::int64_t trials) {
  if (trials <= 0) throw std::invalid_argument("wilson_interval: trials must be positive");
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (phat + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

CoverageResult coverage_test(const PrefixBound& bound_fn, const StreamGenerator& stream,
                             std::int64_t trials, double level, std::uint64_t seed) {
  if (trials < 1000) throw std::invalid_argument("coverage_test: need >= 1e3 trials");
  std::vector<unsigned char> covered(static_cast<std::size_t>(trials), 0);
  parallel_for(covered.size(), [&](std::size_t i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    Rng rng(seq);
    const std::vector<double> dev = stream(rng);
    bool ok = true;
    for (std::size_t k = 0; k < dev.size() && ok; ++k) ok = dev[k] <= bound_fn(k + 1);
    covered[i] = ok ? 1 : 0;
  });
  const auto hits = std::count(covered.begin(), covered.end(), 1);
  CoverageResult r;
  r.trials = trials;
  r.coverage = static_cast<double>(hits) / static_cast<double>(trials);
  r.ci = wilson_interval(hits, trials);
  r.level = level;
  return r;
}

double power_mean_check(std::span<const double> xs, double p, double q) {
  if (!(p > 0.0 && p <= q)) throw std::invalid_argument("power_mean_check: need 0 < p <= q");
  double m = 0.0;
  for (double x : xs) {
    if (!(x > 0.0)) throw std::invalid_argument("power_mean_check: entries must be positive");
    m = std::max(m, x);
  }
  if (xs.empty()) return 0.0;
  double sp = 0.0;
  double sq = 0.0;
  for (double x : xs) {
    sp += std::pow(x / m, p);
    sq += std::pow(x / m, q);
  }
  return m * (std::pow(sp, 1.0 / p) - std::pow(sq, 1.0 / q));
}

double clipped_pareto_second_moment(double a, double xm, double clip) {
  if (!(clip >= xm)) throw std::invalid_argument("clip must be at least the Pareto scale");
  // integral_{xm}^{c} x^2 a xm^a x^(-a-1) dx + c^2 P(R > c)
  const double tail = clip * clip * std::pow(xm / clip, a);
  if (a == 2.0) return 2.0 * xm * xm * std::log(clip / xm) + tail;
  const double body = a * std::pow(xm, a) * (std::pow(clip, 2.0 - a) - std::pow(xm, 2.0 - a)) / (2.0 - a);
  return body + tail;
}

}  // namespace clipnorm
