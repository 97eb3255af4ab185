#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clipnorm/analysis.hpp"
#include "clipnorm/concentration_suite.hpp"
#include "clipnorm/config.hpp"
#include "clipnorm/trajectory.hpp"

namespace clipnorm {

enum ExitCode : int { kExitOk = 0, kExitInvariant = 1, kExitConfig = 2 };

// Everything a run needs besides the seed: the problem, the calibrated noise
// model, the schedule and its certificate.
struct Setup {
  RunConfig config;
  ProblemSpec problem;
  NoiseModel noise;
  MomentCalibration calibration;
  HyperParams hp;
  BurnInCertificate cert;
};

// Validates the config, calibrates G (once, from the base seed) and builds
// the schedule for `config.horizon`.  Throws ConfigError.
Setup prepare(const RunConfig& config);

// Same problem and calibrated G at another horizon or order.
Setup with_schedule(const Setup& base, std::int64_t horizon, Order order);

struct RunReport {
  Setup setup;
  std::vector<Trajectory> trajectories;  // one per seed, base_seed + i
  std::vector<std::string> failures;     // invariant failures, empty on success
  bool ok() const { return failures.empty(); }
};

// Runs n_seeds trajectories.  Per-seed files go to out_dir, or to
// out_dir/seed_<seed> when there is more than one seed:
// trajectory.csv, certificate.json, summary.json, f.svg, grad_norm.svg.
// out_dir/config.ini echoes the resolved config.
RunReport run(const RunConfig& config, bool write_files = true);

// Summary statistics of one trajectory per seed without keeping records.
std::vector<TrajectorySummary> run_summaries(const Setup& setup, WarmupMode warmup,
                                             std::int64_t n_seeds);

struct SweepRow {
  std::int64_t horizon;
  double avg_grad_norm;     // seed mean of (1/T) sum ||grad F(w_t)||_*
  double avg_grad_norm_sd;  // seed standard deviation
  double min_grad_norm;     // seed mean of min_t ||grad F(w_t)||_*
};

struct SweepReport {
  Setup setup;
  std::vector<SweepRow> rows;
  RateFit fit;       // on avg_grad_norm
  RateFit min_fit;   // on min_grad_norm
  double target_slope;
};

// Writes rate_sweep.csv, rate_sweep.json, rate_fit.svg and config.ini.
SweepReport rate_sweep(const RunConfig& config, bool write_files = true);

struct ModeStats {
  WarmupMode mode;
  std::vector<TrajectorySummary> runs;
  double final_f_mean;
  double final_f_half_width;  // 95% normal band
  double min_grad_mean;
  double min_grad_half_width;
  std::int64_t descent_violations;
};

struct BurnInReport {
  Setup setup;
  ModeStats none;
  ModeStats hold;
  std::int64_t batch_size;
  std::int64_t batches;
  std::int64_t hold_not_worse;  // batches where hold's violations <= none's
};

// Runs both warmup modes over the same seeds.  Writes burn_in.csv,
// burn_in.json and config.ini.
BurnInReport burn_in_compare(const RunConfig& config, bool write_files = true);

struct CheckResult {
  std::string name;
  std::int64_t samples = 0;
  std::int64_t violations = 0;
  double worst = 0.0;  // most negative residual or largest error, per check
  std::string note;
  bool pass() const { return violations == 0; }
};

struct OptimizerInvariants {
  CheckResult momentum_ball;     // ||m_t||_* <= tau used by the optimizer
  CheckResult step_length;       // ||w_{t+1} - w_t|| = eta_t
  CheckResult tau_consistency;   // tau = G / alpha^(1/p)
};

// Runs one trajectory with `hp` exactly as given and checks the optimizer
// invariants against it.
OptimizerInvariants check_optimizer_invariants(const ProblemSpec& problem,
                                               const NoiseModel& noise, const HyperParams& hp,
                                               std::uint64_t seed);

struct VerifyReport {
  std::vector<CheckResult> checks;
  double seconds = 0.0;
  bool ok() const;
};

// Full invariant suite.  Writes verify.json when write_files is set.
VerifyReport verify(const RunConfig& config, bool write_files = true);

struct ConcentrationReport {
  std::vector<LemmaCoverage> rows;
  bool ok() const;
};

// Coverage suite at the configured delta, trials and stream length.
// Writes concentration.csv.
ConcentrationReport concentration(const RunConfig& config, bool write_files = true);

}  // namespace clipnorm
