#include "clipnorm/trajectory.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace clipnorm {

Trajectory run_trajectory(const ProblemSpec& problem, const NoiseModel& noise,
                          const HyperParams& hp, const BurnInCertificate& cert,
                          WarmupMode warmup, std::uint64_t seed) {
  Trajectory traj;
  traj.seed = seed;
  traj.warmup = warmup;
  traj.hp = hp;
  traj.cert = cert;
  traj.records.reserve(static_cast<std::size_t>(hp.horizon));

  Rng rng(seed);
  const std::vector<double> etas = warmup_policy(hp, cert, warmup);
  OptimizerState state = initial_state(problem.start());
  double max_step_err = 0.0;
  double max_m_ratio = 0.0;

  auto oracle = [&](const PrimalVector& x) {
    return sample_stochastic_gradient(problem, noise, x, rng);
  };

  for (std::int64_t t = 1; t <= hp.horizon; ++t) {
    const double eta = etas[static_cast<std::size_t>(t - 1)];
    const DualVector grad = true_gradient(problem, state.w);
    StepResult step = hp.order == Order::first
                          ? step_nsgd_clip(state, oracle(state.w), hp, eta)
                          : step_nigt_clip(state, oracle, hp, eta);
    const DualVector& m = step.next.m;
    const DualVector grad_query =
        hp.order == Order::first ? grad : true_gradient(problem, step.query_point);

    StepRecord rec;
    rec.t = t;
    rec.f = objective(problem, state.w);
    rec.grad_norm = dual_norm(grad);
    rec.m_norm = dual_norm(m);
    rec.eps_hat = dual_norm(m - grad);
    rec.eps = dual_norm(step.clipped - grad_query);
    rec.clipped = step.clip_active;
    rec.eta = eta;
    traj.records.push_back(rec);

    if (!m.is_zero() && eta > 0.0) {
      const double len = primal_norm(step.next.w - state.w);
      max_step_err = std::max(max_step_err, std::abs(len - eta) / eta);
    }
    max_m_ratio = std::max(max_m_ratio, rec.m_norm / hp.tau);
    state = std::move(step.next);
  }

  const double final_f = objective(problem, state.w);
  traj.final_point.assign(state.w.components().begin(), state.w.components().end());
  traj.summary = summarize(traj.records, final_f, cert);
  traj.summary.max_step_length_error = max_step_err;
  traj.summary.max_momentum_ratio = max_m_ratio;
  return traj;
}

TrajectorySummary summarize(const std::vector<StepRecord>& records, double final_f,
                            const BurnInCertificate& cert) {
  TrajectorySummary s;
  s.final_f = final_f;
  if (records.empty()) return s;
  s.initial_f = records.front().f;
  s.min_grad_norm = std::numeric_limits<double>::infinity();
  double grad_sum = 0.0;
  std::vector<double> m_norms;
  m_norms.reserve(records.size());
  for (const StepRecord& r : records) {
    s.min_grad_norm = std::min(s.min_grad_norm, r.grad_norm);
    grad_sum += r.grad_norm;
    m_norms.push_back(r.m_norm);
    if (r.clipped) ++s.clip_count;
  }
  s.avg_grad_norm = grad_sum / static_cast<double>(records.size());

  const auto n = static_cast<std::int64_t>(records.size());
  const std::int64_t first = std::max<std::int64_t>(cert.burn_in, 1);
  for (std::int64_t t = first; t <= n; ++t) {
    const StepRecord& r = records[static_cast<std::size_t>(t - 1)];
    ++s.eps_checked;
    if (r.eps_hat > cert.eps_bound) ++s.eps_violations;
    // Frozen steps (eta_t = 0 under a hold warmup) are not optimizer steps.
    if (r.m_norm >= cert.m_threshold && r.eta > 0.0) {
      const double f_next = t < n ? records[static_cast<std::size_t>(t)].f : final_f;
      ++s.descent_checked;
      if (!(f_next < r.f - r.eta / 2.0 * r.m_norm + 1e-9)) ++s.descent_violations;
    }
  }
  if (n >= first) {
    s.selected_output = recommend_output(m_norms, cert);
    s.last_violation = last_momentum_violation(m_norms, cert);
    s.last_iterate_ok =
        records.back().f <= records[static_cast<std::size_t>(s.last_violation - 1)].f + 1e-9;
  }
  return s;
}

void write_trajectory_csv(std::ostream& out, const std::vector<StepRecord>& records) {
  out << kTrajectoryCsvHeader << '\n';
  for (const StepRecord& r : records) {
    out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.17g}\n", r.t, r.f,
                       r.grad_norm, r.m_norm, r.eps_hat, r.eps, r.clipped ? 1 : 0, r.eta);
  }
}

}  // namespace clipnorm
