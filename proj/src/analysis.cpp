#include "clipnorm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace clipnorm {

double check_one_step(const ProblemSpec& problem, const PrimalVector& w,
                      const DualVector& g_star, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("check_one_step: eta must be positive");
  const PrimalVector g = duality_map(g_star);
  const PrimalVector w_next = w - g * eta;
  const DualVector grad = true_gradient(problem, w);
  const DualVector eps = g_star - grad;
  const double rhs = objective(problem, w) - eta * dual_norm(grad) + 2.0 * eta * dual_norm(eps) +
                     problem.smoothness * eta * eta / 2.0;
  return rhs - objective(problem, w_next);
}

double check_smooth_upper(const ProblemSpec& problem, const PrimalVector& x,
                          const PrimalVector& y) {
  const PrimalVector d = x - y;
  const double n = primal_norm(d);
  const double rhs = objective(problem, y) + pairing(true_gradient(problem, y), d) +
                     problem.smoothness / 2.0 * n * n;
  return rhs - objective(problem, x);
}

TaylorResiduals check_second_order_taylor(const ProblemSpec& problem, const PrimalVector& x,
                                          const PrimalVector& y) {
  const double rho = problem.second_order_smoothness;
  const PrimalVector d = x - y;
  const double n = primal_norm(d);
  TaylorResiduals out{};
  const double rhs = objective(problem, y) + pairing(true_gradient(problem, y), d) +
                     0.5 * pairing(hessian_vector_product(problem, y, d), d) +
                     rho / 6.0 * n * n * n;
  out.value = rhs - objective(problem, x);
  const DualVector remainder = true_gradient(problem, y) - true_gradient(problem, x) -
                               hessian_vector_product(problem, x, y - x);
  out.gradient = rho / 2.0 * n * n - dual_norm(remainder);
  return out;
}

RateFit fit_rate_exponent(std::span<const double> t_values, std::span<const double> metrics) {
  if (t_values.size() != metrics.size()) {
    throw std::invalid_argument("fit_rate_exponent: T values and metrics differ in length");
  }
  if (t_values.size() < 3) throw std::invalid_argument("fit_rate_exponent: need at least 3 points");
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    if (!(t_values[i] > 0.0) || !(metrics[i] > 0.0)) {
      throw std::invalid_argument("fit_rate_exponent: T values and metrics must be positive");
    }
  }
  const auto [lo, hi] = std::minmax_element(t_values.begin(), t_values.end());
  if (std::log10(*hi / *lo) < 1.5) {
    throw std::invalid_argument("fit_rate_exponent: T values must span at least 1.5 decades");
  }
  const std::size_t n = t_values.size();
  std::vector<double> x(n), y(n);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(t_values[i]);
    y[i] = std::log(metrics[i]);
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  RateFit fit{};
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - fit.intercept - fit.slope * x[i];
    sse += e * e;
  }
  fit.stderr_slope = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
  return fit;
}

}  // namespace clipnorm
