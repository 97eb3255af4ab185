#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clipnorm/concentration.hpp"

namespace clipnorm {

// Parameters shared by the standard coverage experiments.  Bounded streams
// use symmetric Pareto radii clipped at `clip`, so R = clip and every
// sigma_t^2 = E[min(R, clip)^2] is known in closed form.  Truncation streams
// use the unclipped Pareto radius.
struct CoverageSuiteParams {
  double delta = 0.1;
  std::int64_t trials = 10000;
  std::size_t length = 100;
  std::size_t dim = 5;
  double tail_index = 1.8;
  double scale = 1.0;
  double clip = 10.0;
  double moment_index = 1.5;
  double tau = 10.0;
  double momentum = 0.05;  // weights b_t = (1 - momentum)^(length - t)
  double banach_dual_exponent = 3.0;
  std::uint64_t seed = 7;
};

struct LemmaCoverage {
  std::string lemma;
  double delta;
  CoverageResult result;
};

LemmaCoverage scalar_freedman_coverage(const CoverageSuiteParams& params);
LemmaCoverage hilbert_freedman_coverage(const CoverageSuiteParams& params);
LemmaCoverage banach_freedman_coverage(const CoverageSuiteParams& params);
LemmaCoverage truncated_sum_coverage(const CoverageSuiteParams& params, TruncationVariant variant);

// All of the above, in a fixed order.
std::vector<LemmaCoverage> run_coverage_suite(const CoverageSuiteParams& params);

// CSV with columns lemma,delta,trials,coverage,ci_low,ci_high,pass.
std::string coverage_csv(const std::vector<LemmaCoverage>& rows);

struct MajorantSweep {
  std::int64_t streams = 0;
  std::int64_t s_bound_violations = 0;  // |s_t| > ||X_t|| + 1e-9 (1 + ||X_t||)
  std::int64_t majorant_violations = 0; // ||sum X|| > majorant + 1e-9 (1 + majorant)
  double worst_margin = 0.0;            // min over streams of majorant - ||sum X||
};

// Random streams in `space` (drifting or centred, Pareto radii) checked
// against |s_t| <= ||X_t|| and the s-sequence majorant.
MajorantSweep majorant_sweep(const NormedSpace& space, std::size_t length, std::int64_t streams,
                             std::uint64_t seed);

}  // namespace clipnorm
