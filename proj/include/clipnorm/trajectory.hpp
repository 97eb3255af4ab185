#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "clipnorm/optimizers.hpp"
#include "clipnorm/problems.hpp"

namespace clipnorm {

// One row per step t = 1..T, measured at w_t before the update.
struct StepRecord {
  std::int64_t t;
  double f;          // F(w_t)
  double grad_norm;  // ||grad F(w_t)||_*
  double m_norm;     // ||m_t||_*
  double eps_hat;    // ||m_t - grad F(w_t)||_*
  double eps;        // ||g^clip_t - grad F(query point)||_*
  bool clipped;
  double eta;        // eta_t actually used
};

struct TrajectorySummary {
  double initial_f = 0.0;
  double final_f = 0.0;  // F(w_{T+1})
  double min_grad_norm = 0.0;
  double avg_grad_norm = 0.0;
  std::int64_t selected_output = 0;  // recommend_output
  std::int64_t last_violation = 0;   // last step failing the momentum condition
  bool last_iterate_ok = true;       // F(w_T) <= F(w_that) + 1e-9
  std::int64_t descent_checked = 0;
  std::int64_t descent_violations = 0;
  std::int64_t eps_checked = 0;
  std::int64_t eps_violations = 0;
  std::int64_t clip_count = 0;
  double max_step_length_error = 0.0;  // max | ||w_{t+1}-w_t|| - eta_t | / eta_t
  double max_momentum_ratio = 0.0;     // max ||m_t||_* / tau
};

struct Trajectory {
  std::uint64_t seed = 0;
  WarmupMode warmup = WarmupMode::none;
  HyperParams hp{};
  BurnInCertificate cert{};
  std::vector<StepRecord> records;
  std::vector<double> final_point;
  TrajectorySummary summary;
};

// Runs T steps of the algorithm selected by hp.order.  Samples come from an
// mt19937_64 seeded with `seed` only, so two runs that differ in algorithm
// but share a seed see the same noise stream.
Trajectory run_trajectory(const ProblemSpec& problem, const NoiseModel& noise,
                          const HyperParams& hp, const BurnInCertificate& cert,
                          WarmupMode warmup, std::uint64_t seed);

// Recomputes the certificate-based statistics from the records.
TrajectorySummary summarize(const std::vector<StepRecord>& records, double final_f,
                            const BurnInCertificate& cert);

inline constexpr const char* kTrajectoryCsvHeader = "t,f,grad_norm,m_norm,eps_hat,eps,clipped,eta";

// Header plus one row per record, floats at 17 significant digits.
void write_trajectory_csv(std::ostream& out, const std::vector<StepRecord>& records);

}  // namespace clipnorm
