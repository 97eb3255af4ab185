#pragma once

#include <span>

#include "clipnorm/normed_space.hpp"
#include "clipnorm/problems.hpp"

namespace clipnorm {

// Residuals are RHS - LHS of the checked inequality; a correct constant
// gives residual >= -kResidualTolerance.
inline constexpr double kResidualTolerance = 1e-9;

// F(w) - eta ||grad F(w)||_* + 2 eta ||eps||_* + L eta^2 / 2 - F(w - eta d(g_star)),
// with eps = g_star - grad F(w).
double check_one_step(const ProblemSpec& problem, const PrimalVector& w,
                      const DualVector& g_star, double eta);

// F(y) + <grad F(y), x - y> + L/2 ||x - y||^2 - F(x).
double check_smooth_upper(const ProblemSpec& problem, const PrimalVector& x,
                          const PrimalVector& y);

struct TaylorResiduals {
  double value;     // cubic upper bound on F(x) around y
  double gradient;  // rho/2 ||x-y||^2 - ||grad F(y) - grad F(x) - H(x)(y-x)||_*
};

TaylorResiduals check_second_order_taylor(const ProblemSpec& problem, const PrimalVector& x,
                                          const PrimalVector& y);

struct RateFit {
  double slope;
  double stderr_slope;
  double intercept;
};

// Least-squares fit of log(metric) against log(T).  Needs >= 3 points
// spanning >= 1.5 decades and positive metrics.
RateFit fit_rate_exponent(std::span<const double> t_values, std::span<const double> metrics);

}  // namespace clipnorm
