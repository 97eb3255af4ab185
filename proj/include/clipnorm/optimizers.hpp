#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clipnorm/normed_space.hpp"

namespace clipnorm {

// first: normalized SGD with clipping and momentum.
// second: NIGT with clipping (gradient queried at an extrapolated point).
enum class Order { first, second };

std::string to_string(Order order);

// Exponent e in alpha = b / T^e.
double momentum_exponent(double moment_index, Order order);
// Exponent e in eta = s / T^e.
double step_exponent(double moment_index, Order order);
// Exponent e of the convergence rate T^-e; also the exponent in the
// post-burn-in momentum-error bound.
double rate_exponent(double moment_index, Order order);

struct HyperParams {
  std::int64_t horizon;  // T
  double b;
  double s;
  double moment_index;
  double g;
  double alpha;
  double beta;  // 1 - alpha
  double eta;
  double tau;   // g / alpha^(1/p)
  double delta;
  Order order;
};

// Horizon-dependent schedule for the chosen order.  Throws std::invalid_argument on
// bad inputs and when alpha > 1 (horizon too short for the chosen b).
HyperParams schedule(std::int64_t horizon, double b, double s, double moment_index, double g,
                     double delta, Order order);

struct OptimizerState {
  std::int64_t t;
  PrimalVector w;
  PrimalVector w_prev;
  DualVector m;
};

// t = 1, w_prev = w = w1, m = 0.
OptimizerState initial_state(const PrimalVector& w1);

struct StepResult {
  OptimizerState next;
  PrimalVector query_point;  // where the gradient sample was taken
  DualVector clipped;        // g^clip_t
  bool clip_active;
};

// m' = beta m + (1 - beta) clip(g, tau);  w' = w - eta d(m').
StepResult step_nsgd_clip(const OptimizerState& state, const DualVector& g_sample,
                          const HyperParams& hp, double eta);
inline StepResult step_nsgd_clip(const OptimizerState& state, const DualVector& g_sample,
                                 const HyperParams& hp) {
  return step_nsgd_clip(state, g_sample, hp, hp.eta);
}

// x_t = w_t + beta (w_t - w_{t-1}) / (1 - beta).  Throws if beta >= 1.
PrimalVector extrapolation_point(const OptimizerState& state, double beta);

namespace detail {
StepResult finish_step(const OptimizerState& state, const PrimalVector& query,
                       const DualVector& g_sample, const HyperParams& hp, double eta);
}

// NIGT step: queries oracle(x_t) once, then clips, mixes and normalizes
// exactly like step_nsgd_clip.
template <class Oracle>
StepResult step_nigt_clip(const OptimizerState& state, Oracle&& oracle, const HyperParams& hp,
                          double eta) {
  PrimalVector x = extrapolation_point(state, hp.beta);
  DualVector g = oracle(static_cast<const PrimalVector&>(x));
  return detail::finish_step(state, x, g, hp, eta);
}

template <class Oracle>
StepResult step_nigt_clip(const OptimizerState& state, Oracle&& oracle, const HyperParams& hp) {
  return step_nigt_clip(state, std::forward<Oracle>(oracle), hp, hp.eta);
}

struct BurnInCertificate {
  double d_delta;       // max(1, log(3T/delta))
  double k;
  double z;
  double burn_in_raw;   // unclamped formula value
  std::int64_t burn_in; // clamped to [0, T] and rounded up
  double m_threshold;   // momentum condition RHS
  double eps_bound;     // bound on ||m_t - grad F(w_t)||_* for t >= burn_in
  double grad_bound;    // bound on ||grad F(w_t)||_* when the momentum condition fails
};

BurnInCertificate burn_in_certificate(const HyperParams& hp, double smoothness,
                                      double second_order_smoothness, double smooth_c, double g);

// 1-based argmin over t >= max(burn_in, 1) of m_norms[t-1], ties to the
// smallest t.  Throws std::invalid_argument if the trajectory is shorter than
// the burn-in.
std::int64_t recommend_output(std::span<const double> m_norms, const BurnInCertificate& cert);

// Last 1-based t >= max(burn_in, 1) whose momentum norm is below the
// threshold; max(burn_in, 1) when there is none.
std::int64_t last_momentum_violation(std::span<const double> m_norms,
                                     const BurnInCertificate& cert);

enum class WarmupMode { none, hold };

std::string to_string(WarmupMode mode);
WarmupMode parse_warmup_mode(const std::string& name);

// Per-step learning rates eta_1..eta_T.  hold: eta_t = 0 for t <= burn_in.
std::vector<double> warmup_policy(const HyperParams& hp, const BurnInCertificate& cert,
                                  WarmupMode mode);

}  // namespace clipnorm
