#include "clipnorm/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clipnorm {

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::quadratic:
      return "quadratic";
    case ProblemKind::cosine_sum:
      return "cosine_sum";
  }
  return "unknown";
}

ProblemKind parse_problem_kind(const std::string& name) {
  if (name == "quadratic") return ProblemKind::quadratic;
  if (name == "cosine_sum") return ProblemKind::cosine_sum;
  throw std::invalid_argument("unknown problem kind '" + name + "'");
}

namespace {

void require_dim(const ProblemSpec& problem, const NormedSpace& space) {
  if (!(problem.space == space)) {
    throw std::invalid_argument("point does not belong to the problem's space (dim " +
                                std::to_string(space.dim()) + " vs " +
                                std::to_string(problem.space.dim()) + ")");
  }
}

void require_size(const std::vector<double>& v, std::size_t dim, const char* what) {
  if (v.size() != dim) {
    throw std::invalid_argument(std::string(what) + " has " + std::to_string(v.size()) +
                                " entries, expected " + std::to_string(dim));
  }
}

}  // namespace

double ProblemSpec::lower_bound() const {
  if (kind == ProblemKind::quadratic) return 0.0;
  return -amplitude * static_cast<double>(space.dim());
}

ProblemSpec make_quadratic(const NormedSpace& space, std::vector<double> eigenvalues,
                           std::vector<double> optimum, std::vector<double> initial_point) {
  require_size(eigenvalues, space.dim(), "eigenvalues");
  require_size(optimum, space.dim(), "optimum");
  require_size(initial_point, space.dim(), "initial point");
  for (double l : eigenvalues) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw std::invalid_argument("quadratic eigenvalues must be positive and finite");
    }
  }
  ProblemSpec p{.kind = ProblemKind::quadratic, .space = space};
  p.smoothness = *std::max_element(eigenvalues.begin(), eigenvalues.end());
  p.second_order_smoothness = 0.0;
  p.eigenvalues = std::move(eigenvalues);
  p.optimum = std::move(optimum);
  p.initial_point = std::move(initial_point);
  (void)p.start();  // finiteness check
  (void)PrimalVector(space, p.optimum);
  return p;
}

ProblemSpec make_cosine_sum(const NormedSpace& space, double amplitude,
                            std::vector<double> initial_point) {
  require_size(initial_point, space.dim(), "initial point");
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw std::invalid_argument("cosine_sum amplitude must be positive");
  }
  ProblemSpec p{.kind = ProblemKind::cosine_sum, .space = space};
  p.amplitude = amplitude;
  p.smoothness = amplitude;
  p.second_order_smoothness = amplitude;
  p.initial_point = std::move(initial_point);
  (void)p.start();
  return p;
}

double objective(const ProblemSpec& problem, const PrimalVector& w) {
  require_dim(problem, w.space());
  double acc = 0.0;
  if (problem.kind == ProblemKind::quadratic) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double d = w[i] - problem.optimum[i];
      acc += problem.eigenvalues[i] * d * d;
    }
    return 0.5 * acc;
  }
  for (std::size_t i = 0; i < w.size(); ++i) acc += std::cos(w[i]);
  return problem.amplitude * acc;
}

DualVector true_gradient(const ProblemSpec& problem, const PrimalVector& w) {
  require_dim(problem, w.space());
  std::vector<double> g(w.size());
  if (problem.kind == ProblemKind::quadratic) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      g[i] = problem.eigenvalues[i] * (w[i] - problem.optimum[i]);
    }
  } else {
    for (std::size_t i = 0; i < w.size(); ++i) g[i] = -problem.amplitude * std::sin(w[i]);
  }
  return DualVector(problem.space, std::move(g));
}

DualVector hessian_vector_product(const ProblemSpec& problem, const PrimalVector& at,
                                  const PrimalVector& v) {
  require_dim(problem, at.space());
  require_dim(problem, v.space());
  std::vector<double> h(at.size());
  if (problem.kind == ProblemKind::quadratic) {
    for (std::size_t i = 0; i < at.size(); ++i) h[i] = problem.eigenvalues[i] * v[i];
  } else {
    for (std::size_t i = 0; i < at.size(); ++i) {
      h[i] = -problem.amplitude * std::cos(at[i]) * v[i];
    }
  }
  return DualVector(problem.space, std::move(h));
}

double NoiseModel::moment_bound() const {
  if (!calibrated_g) {
    throw std::logic_error("noise model used before calibrate_moment_bound");
  }
  return *calibrated_g;
}

NoiseModel make_noise_model(double moment_index, double tail_index, double scale) {
  if (!(moment_index > 1.0 && moment_index <= 2.0)) {
    throw std::invalid_argument("moment index must lie in (1, 2]");
  }
  if (!(tail_index > moment_index) || !std::isfinite(tail_index)) {
    throw std::invalid_argument("tail index must exceed the moment index (finite p-th moment)");
  }
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("noise scale must be non-negative");
  }
  NoiseModel n{moment_index, tail_index, scale};
  return n;
}

double pareto_moment(double tail_index, double scale, double order) {
  if (!(order < tail_index)) throw std::domain_error("Pareto moment of order >= tail index is infinite");
  return tail_index * std::pow(scale, order) / (tail_index - order);
}

double sample_pareto_radius(double tail_index, double scale, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = 1.0 - unif(rng);  // (0, 1]
  return scale * std::pow(u, -1.0 / tail_index);
}

DualVector sample_noise(const NoiseModel& noise, const NormedSpace& space, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> u(space.dim());
  double n = 0.0;
  while (n == 0.0) {
    for (double& c : u) c = normal(rng);
    n = lp_norm(u, space.dual_exponent());
  }
  const double radius = sample_pareto_radius(noise.tail_index, noise.scale, rng);
  for (double& c : u) c = c / n * radius;
  return DualVector(space, std::move(u));
}

DualVector sample_stochastic_gradient(const ProblemSpec& problem, const NoiseModel& noise,
                                      const PrimalVector& w, Rng& rng) {
  DualVector g = true_gradient(problem, w);
  DualVector xi = sample_noise(noise, problem.space, rng);
  if (noise.scale == 0.0) return g;
  return g + xi;
}

MomentCalibration calibrate_moment_bound(const ProblemSpec& problem, NoiseModel& noise,
                                         std::int64_t n_samples, double safety, Rng& rng) {
  if (n_samples < 10000) throw std::invalid_argument("calibration needs at least 1e4 samples");
  if (!(safety >= 1.0)) throw std::invalid_argument("calibration safety factor must be >= 1");
  const PrimalVector w1 = problem.start();
  const DualVector grad = true_gradient(problem, w1);
  const double p = noise.moment_index;
  double total = 0.0;
  double pure = 0.0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const DualVector g = sample_stochastic_gradient(problem, noise, w1, rng);
    total += std::pow(dual_norm(g), p);
    pure += std::pow(dual_norm(g - grad), p);
  }
  const double n = static_cast<double>(n_samples);
  MomentCalibration c;
  c.total_moment = std::pow(total / n, 1.0 / p);
  c.noise_moment = std::pow(pure / n, 1.0 / p);
  c.g = safety * std::max(c.total_moment, c.noise_moment);
  c.samples = n_samples;
  c.safety = safety;
  noise.calibrated_g = c.g;
  return c;
}

}  // namespace clipnorm
