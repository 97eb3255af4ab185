#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "clipnorm/normed_space.hpp"

namespace clipnorm {

using Rng = std::mt19937_64;

enum class ProblemKind { quadratic, cosine_sum };

std::string to_string(ProblemKind kind);
ProblemKind parse_problem_kind(const std::string& name);

// Separable synthetic objective.
//   quadratic:  F(w) = 1/2 sum lambda_i (w_i - w*_i)^2,  L = max lambda, rho = 0
//   cosine_sum: F(w) = a sum cos(w_i),                     L = a,          rho = a
// Both constants hold for every space with dual exponent >= 2, since
// ||.||_r <= ||.||_2 <= ||.||_q there.
struct ProblemSpec {
  ProblemKind kind;
  NormedSpace space;
  std::vector<double> eigenvalues;  // quadratic only
  std::vector<double> optimum;      // quadratic only
  double amplitude = 0.0;           // cosine_sum only
  double smoothness = 0.0;          // L
  double second_order_smoothness = 0.0;  // rho
  std::vector<double> initial_point;

  PrimalVector start() const { return PrimalVector(space, initial_point); }
  // inf F
  double lower_bound() const;
};

ProblemSpec make_quadratic(const NormedSpace& space, std::vector<double> eigenvalues,
                           std::vector<double> optimum, std::vector<double> initial_point);
ProblemSpec make_cosine_sum(const NormedSpace& space, double amplitude,
                            std::vector<double> initial_point);

double objective(const ProblemSpec& problem, const PrimalVector& w);
DualVector true_gradient(const ProblemSpec& problem, const PrimalVector& w);
// Hessian at `at` applied to direction v (both problems have diagonal Hessians).
DualVector hessian_vector_product(const ProblemSpec& problem, const PrimalVector& at,
                                  const PrimalVector& v);

enum class NoiseMode { additive_dual };

// Additive dual-space noise xi = R u with R = x_m U^(-1/a) (Pareto radius)
// and u uniform on the Euclidean sphere, rescaled to unit dual norm, so
// ||xi||_* = R exactly.  Symmetric in u, hence E[xi] = 0.
struct NoiseModel {
  double moment_index;  // p-moment exponent, in (1, 2]
  double tail_index;    // Pareto shape a > moment_index
  double scale;         // x_m >= 0; 0 disables noise
  NoiseMode mode = NoiseMode::additive_dual;
  std::optional<double> calibrated_g;

  // Throws std::logic_error before calibrate_moment_bound has run.
  double moment_bound() const;
};

NoiseModel make_noise_model(double moment_index, double tail_index, double scale);

// E[R^k] for R ~ Pareto(a, x_m), k < a.
double pareto_moment(double tail_index, double scale, double order);

// One Pareto radius x_m U^(-1/a).
double sample_pareto_radius(double tail_index, double scale, Rng& rng);

DualVector sample_noise(const NoiseModel& noise, const NormedSpace& space, Rng& rng);

// grad F(w) + xi.
DualVector sample_stochastic_gradient(const ProblemSpec& problem, const NoiseModel& noise,
                                      const PrimalVector& w, Rng& rng);

struct MomentCalibration {
  double g;              // value stored into the noise model
  double total_moment;   // (mean ||grad f(w1,z)||_*^p)^(1/p)
  double noise_moment;   // (mean ||grad f(w1,z) - grad F(w1)||_*^p)^(1/p)
  std::int64_t samples;
  double safety;
};

// G = safety * max(total_moment, noise_moment), measured at the initial point.
// Requires n_samples >= 1e4 and safety >= 1.
MomentCalibration calibrate_moment_bound(const ProblemSpec& problem, NoiseModel& noise,
                                         std::int64_t n_samples, double safety, Rng& rng);

}  // namespace clipnorm
