#include "clipnorm/concentration_suite.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "clipnorm/parallel.hpp"

namespace clipnorm {

namespace {

// Uniform direction on the Euclidean sphere rescaled to unit dual norm.
std::vector<double> unit_direction(const NormedSpace& space, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> u(space.dim());
  double n = 0.0;
  while (n == 0.0) {
    for (double& c : u) c = normal(rng);
    n = lp_norm(u, space.dual_exponent());
  }
  for (double& c : u) c /= n;
  return u;
}

std::vector<double> prefix_table(std::size_t length, const std::function<double(std::size_t)>& fn) {
  std::vector<double> out(length);
  for (std::size_t k = 1; k <= length; ++k) out[k - 1] = fn(k);
  return out;
}

// Deviations ||sum_{t<=k} X_t|| for a bounded isotropic stream in `space`.
std::vector<double> bounded_vector_stream(const NormedSpace& space, const CoverageSuiteParams& p,
                                          Rng& rng) {
  std::vector<double> sum(space.dim(), 0.0);
  std::vector<double> dev(p.length);
  for (std::size_t t = 0; t < p.length; ++t) {
    const std::vector<double> u = unit_direction(space, rng);
    const double radius = std::min(sample_pareto_radius(p.tail_index, p.scale, rng), p.clip);
    for (std::size_t i = 0; i < u.size(); ++i) sum[i] += radius * u[i];
    dev[t] = lp_norm(sum, space.dual_exponent());
  }
  return dev;
}

LemmaCoverage bounded_vector_coverage(const std::string& name, const NormedSpace& space,
                                      const CoverageSuiteParams& p, double level,
                                      const std::function<double(std::size_t)>& bound) {
  const std::vector<double> bounds = prefix_table(p.length, bound);
  const CoverageResult r = coverage_test(
      [&](std::size_t k) { return bounds[k - 1]; },
      [&](Rng& rng) { return bounded_vector_stream(space, p, rng); }, p.trials, level, p.seed);
  return {name, p.delta, r};
}

}  // namespace

LemmaCoverage scalar_freedman_coverage(const CoverageSuiteParams& p) {
  const double var = clipped_pareto_second_moment(p.tail_index, p.scale, p.clip);
  const std::vector<double> bounds = prefix_table(p.length, [&](std::size_t k) {
    const std::vector<double> sigma_sq(k, var);
    return freedman_scalar_bound(p.clip, sigma_sq, p.delta);
  });
  const CoverageResult r = coverage_test(
      [&](std::size_t k) { return bounds[k - 1]; },
      [&](Rng& rng) {
        std::bernoulli_distribution coin(0.5);
        std::vector<double> dev(p.length);
        double sum = 0.0;
        for (std::size_t t = 0; t < p.length; ++t) {
          const double radius = std::min(sample_pareto_radius(p.tail_index, p.scale, rng), p.clip);
          sum += coin(rng) ? radius : -radius;
          dev[t] = sum;
        }
        return dev;
      },
      p.trials, 1.0 - p.delta, p.seed);
  return {"freedman_scalar", p.delta, r};
}

LemmaCoverage hilbert_freedman_coverage(const CoverageSuiteParams& p) {
  const double sigma = std::sqrt(clipped_pareto_second_moment(p.tail_index, p.scale, p.clip));
  return bounded_vector_coverage(
      "freedman_hilbert", NormedSpace::euclidean(p.dim), p, 1.0 - 3.0 * p.delta,
      [&](std::size_t k) {
        return freedman_hilbert_bound(p.clip, std::vector<double>(k, sigma), p.delta);
      });
}

LemmaCoverage banach_freedman_coverage(const CoverageSuiteParams& p) {
  const NormedSpace space = NormedSpace::from_dual_exponent(p.dim, p.banach_dual_exponent);
  const double c = space.smooth_constant();
  const double sigma = std::sqrt(clipped_pareto_second_moment(p.tail_index, p.scale, p.clip));
  return bounded_vector_coverage(
      "freedman_banach", space, p, 1.0 - p.delta, [&](std::size_t k) {
        return freedman_banach_bound(p.clip, std::vector<double>(k, sigma), p.delta, c,
                                     NormedSpace::smooth_p());
      });
}

LemmaCoverage truncated_sum_coverage(const CoverageSuiteParams& p, TruncationVariant variant) {
  const NormedSpace space = variant == TruncationVariant::hilbert
                                ? NormedSpace::euclidean(p.dim)
                                : NormedSpace::from_dual_exponent(p.dim, p.banach_dual_exponent);
  WeightedStreamSpec spec;
  spec.tau = p.tau;
  spec.moment_index = p.moment_index;
  spec.delta = p.delta;
  spec.smooth_c = variant == TruncationVariant::hilbert ? 1.0 : space.smooth_constant();
  const double g = std::pow(pareto_moment(p.tail_index, p.scale, p.moment_index),
                            1.0 / p.moment_index);
  for (std::size_t t = 1; t <= p.length; ++t) {
    spec.weights.push_back(std::pow(1.0 - p.momentum, static_cast<double>(p.length - t)));
    spec.moment_bounds.push_back(g);
  }
  const double bound = truncated_sum_bound(spec, variant);
  const CoverageResult r = coverage_test(
      [&](std::size_t) { return bound; },
      [&](Rng& rng) {
        std::vector<double> sum(space.dim(), 0.0);
        for (std::size_t t = 0; t < p.length; ++t) {
          const std::vector<double> u = unit_direction(space, rng);
          const double radius = std::min(sample_pareto_radius(p.tail_index, p.scale, rng), p.tau);
          for (std::size_t i = 0; i < u.size(); ++i) sum[i] += spec.weights[t] * radius * u[i];
        }
        return std::vector<double>{lp_norm(sum, space.dual_exponent())};
      },
      p.trials, 1.0 - p.delta, p.seed);
  return {variant == TruncationVariant::hilbert ? "truncated_sum_hilbert" : "truncated_sum_banach",
          p.delta, r};
}

std::vector<LemmaCoverage> run_coverage_suite(const CoverageSuiteParams& p) {
  return {scalar_freedman_coverage(p), hilbert_freedman_coverage(p), banach_freedman_coverage(p),
          truncated_sum_coverage(p, TruncationVariant::hilbert),
          truncated_sum_coverage(p, TruncationVariant::banach)};
}

std::string coverage_csv(const std::vector<LemmaCoverage>& rows) {
  std::string out = "lemma,delta,trials,coverage,ci_low,ci_high,pass\n";
  for (const LemmaCoverage& row : rows) {
    out += fmt::format("{},{:.17g},{},{:.17g},{:.17g},{:.17g},{}\n", row.lemma, row.delta,
                       row.result.trials, row.result.coverage, row.result.ci.low,
                       row.result.ci.high, row.result.pass() ? "true" : "false");
  }
  return out;
}

MajorantSweep majorant_sweep(const NormedSpace& space, std::size_t length, std::int64_t streams,
                             std::uint64_t seed) {
  struct Outcome {
    std::int64_t s_bad = 0;
    std::int64_t maj_bad = 0;
    double margin = 0.0;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(streams));
  parallel_for(outcomes.size(), [&](std::size_t i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(i),
                      static_cast<std::uint32_t>(length)};
    Rng rng(seq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    // Half of the streams drift, so prefix sums grow linearly.
    const bool drift = unif(rng) < 0.5;
    const std::vector<double> mu = unit_direction(space, rng);
    const double mu_scale = drift ? 2.0 * unif(rng) : 0.0;
    std::vector<DualVector> xs;
    xs.reserve(length);
    for (std::size_t t = 0; t < length; ++t) {
      std::vector<double> x(space.dim(), 0.0);
      if (unif(rng) >= 0.05) {  // occasional exact zeros
        const std::vector<double> u = unit_direction(space, rng);
        const double radius = sample_pareto_radius(1.8, 1.0, rng);
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = mu_scale * mu[j] + radius * u[j];
      }
      xs.emplace_back(space, std::move(x));
    }
    const std::vector<double> s = s_sequence(xs);
    Outcome o;
    for (std::size_t t = 0; t < length; ++t) {
      const double n = dual_norm(xs[t]);
      if (std::abs(s[t]) > n + 1e-9 * (1.0 + n)) ++o.s_bad;
    }
    DualVector total = DualVector::zeros(space);
    for (const DualVector& x : xs) total = total + x;
    const double lhs = dual_norm(total);
    const double maj = s_sequence_majorant(xs);
    o.margin = maj - lhs;
    if (lhs > maj + 1e-9 * (1.0 + maj)) o.maj_bad = 1;
    outcomes[i] = o;
  });
  MajorantSweep out;
  out.streams = streams;
  out.worst_margin = std::numeric_limits<double>::infinity();
  for (const Outcome& o : outcomes) {
    out.s_bound_violations += o.s_bad;
    out.majorant_violations += o.maj_bad;
    out.worst_margin = std::min(out.worst_margin, o.margin);
  }
  return out;
}

}  // namespace clipnorm
