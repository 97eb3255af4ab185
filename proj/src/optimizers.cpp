#include "clipnorm/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clipnorm {

std::string to_string(Order order) { return order == Order::first ? "first" : "second"; }

double momentum_exponent(double p, Order order) {
  return order == Order::first ? p / (3.0 * p - 2.0) : 2.0 * p / (5.0 * p - 3.0);
}

double step_exponent(double p, Order order) {
  return order == Order::first ? (2.0 * p - 1.0) / (3.0 * p - 2.0)
                               : (3.0 * p - 1.0) / (5.0 * p - 3.0);
}

double rate_exponent(double p, Order order) {
  return order == Order::first ? (p - 1.0) / (3.0 * p - 2.0) : (2.0 * p - 2.0) / (5.0 * p - 3.0);
}

HyperParams schedule(std::int64_t horizon, double b, double s, double moment_index, double g,
                     double delta, Order order) {
  if (horizon < 1) throw std::invalid_argument("schedule: horizon T must be >= 1");
  if (!(b > 0.0)) throw std::invalid_argument("schedule: b must be positive");
  if (!(s > 0.0)) throw std::invalid_argument("schedule: s must be positive");
  if (!(moment_index > 1.0 && moment_index <= 2.0)) {
    throw std::invalid_argument("schedule: moment index must lie in (1, 2]");
  }
  if (!(g > 0.0) || !std::isfinite(g)) throw std::invalid_argument("schedule: G must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("schedule: delta must lie in (0, 1)");

  const double T = static_cast<double>(horizon);
  HyperParams hp{};
  hp.horizon = horizon;
  hp.b = b;
  hp.s = s;
  hp.moment_index = moment_index;
  hp.g = g;
  hp.delta = delta;
  hp.order = order;
  hp.alpha = b / std::pow(T, momentum_exponent(moment_index, order));
  if (hp.alpha > 1.0) {
    throw std::invalid_argument("schedule: alpha = " + std::to_string(hp.alpha) +
                                " > 1; increase T or decrease b");
  }
  hp.beta = 1.0 - hp.alpha;
  hp.eta = s / std::pow(T, step_exponent(moment_index, order));
  hp.tau = g / std::pow(hp.alpha, 1.0 / moment_index);
  return hp;
}

OptimizerState initial_state(const PrimalVector& w1) {
  return OptimizerState{1, w1, w1, DualVector::zeros(w1.space())};
}

namespace detail {

StepResult finish_step(const OptimizerState& state, const PrimalVector& query,
                       const DualVector& g_sample, const HyperParams& hp, double eta) {
  require_same_space(state.w.space(), g_sample.space());
  DualVector clipped = clip_dual(g_sample, hp.tau);
  const bool active = !(clipped == g_sample);
  DualVector m = state.m * hp.beta + clipped * (1.0 - hp.beta);
  PrimalVector w = state.w - duality_map(m) * eta;
  return StepResult{OptimizerState{state.t + 1, std::move(w), state.w, std::move(m)}, query,
                    std::move(clipped), active};
}

}  // namespace detail

StepResult step_nsgd_clip(const OptimizerState& state, const DualVector& g_sample,
                          const HyperParams& hp, double eta) {
  return detail::finish_step(state, state.w, g_sample, hp, eta);
}

PrimalVector extrapolation_point(const OptimizerState& state, double beta) {
  if (!(beta < 1.0)) throw std::invalid_argument("extrapolation_point: beta must be < 1");
  if (beta == 0.0) return state.w;
  return state.w + (state.w - state.w_prev) * (beta / (1.0 - beta));
}

BurnInCertificate burn_in_certificate(const HyperParams& hp, double smoothness,
                                      double second_order_smoothness, double smooth_c, double g) {
  const double T = static_cast<double>(hp.horizon);
  const double p = hp.moment_index;
  BurnInCertificate c{};
  c.d_delta = std::max(1.0, std::log(3.0 * T / hp.delta));
  const double mix = momentum_exponent(p, hp.order);
  const double rate = rate_exponent(p, hp.order);
  const double step = step_exponent(p, hp.order);
  if (hp.order == Order::first) {
    c.k = 10.0 * smooth_c * c.d_delta + 4.0 * std::sqrt(smooth_c) * std::sqrt(c.d_delta) + 1.0;
    c.z = hp.s * smoothness / hp.b + g * c.k * std::pow(hp.b, (p - 1.0) / p);
  } else {
    c.k = 10.0 * c.d_delta + 4.0 * std::sqrt(smooth_c * c.d_delta) + 1.0;
    c.z = second_order_smoothness * hp.s * hp.s / (hp.b * hp.b) +
          g * c.k * std::pow(hp.b, (p - 1.0) / p);
  }
  c.burn_in_raw =
      std::pow(T, mix) / hp.b * (rate * std::log(T) + std::log(g) - std::log(c.z));
  const double clamped = std::clamp(c.burn_in_raw, 0.0, T);
  c.burn_in = static_cast<std::int64_t>(std::ceil(clamped));
  const double t_rate = std::pow(T, rate);
  const double t_step = std::pow(T, step);
  c.eps_bound = 2.0 * c.z / t_rate;
  c.m_threshold = 2.0 * (6.0 * c.z / t_rate + smoothness * hp.s / (2.0 * t_step));
  c.grad_bound = 14.0 * c.z / t_rate + smoothness * hp.s / t_step;
  return c;
}

std::int64_t recommend_output(std::span<const double> m_norms, const BurnInCertificate& cert) {
  const auto n = static_cast<std::int64_t>(m_norms.size());
  const std::int64_t first = std::max<std::int64_t>(cert.burn_in, 1);
  if (n < first) {
    throw std::invalid_argument("recommend_output: trajectory has " + std::to_string(n) +
                                " steps, burn-in is " + std::to_string(cert.burn_in));
  }
  std::int64_t best = first;
  for (std::int64_t t = first + 1; t <= n; ++t) {
    if (m_norms[t - 1] < m_norms[best - 1]) best = t;
  }
  return best;
}

std::int64_t last_momentum_violation(std::span<const double> m_norms,
                                     const BurnInCertificate& cert) {
  const auto n = static_cast<std::int64_t>(m_norms.size());
  const std::int64_t first = std::max<std::int64_t>(cert.burn_in, 1);
  for (std::int64_t t = n; t >= first; --t) {
    if (m_norms[t - 1] < cert.m_threshold) return t;
  }
  return first;
}

std::string to_string(WarmupMode mode) { return mode == WarmupMode::none ? "none" : "hold"; }

WarmupMode parse_warmup_mode(const std::string& name) {
  if (name == "none") return WarmupMode::none;
  if (name == "hold") return WarmupMode::hold;
  throw std::invalid_argument("unknown warmup mode '" + name + "'");
}

std::vector<double> warmup_policy(const HyperParams& hp, const BurnInCertificate& cert,
                                  WarmupMode mode) {
  std::vector<double> etas(static_cast<std::size_t>(hp.horizon), hp.eta);
  if (mode == WarmupMode::hold) {
    const auto frozen = std::min<std::int64_t>(cert.burn_in, hp.horizon);
    std::fill_n(etas.begin(), frozen, 0.0);
  }
  return etas;
}

}  // namespace clipnorm
