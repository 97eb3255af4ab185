#include "clipnorm/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "clipnorm/parallel.hpp"
#include "json.hpp"
#include "clipnorm/svg.hpp"

namespace clipnorm {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::seed_seq seed_words(std::uint64_t seed, std::uint32_t stream) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       stream};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

HyperParams make_schedule(const RunConfig& c, double g) {
  try {
    return schedule(c.horizon, c.b, c.s, c.moment_index, g, c.delta, c.algorithm);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("run.b", e.what());
  }
}

BurnInCertificate make_certificate(const ProblemSpec& problem, const HyperParams& hp) {
  return burn_in_certificate(hp, problem.smoothness, problem.second_order_smoothness,
                             problem.space.smooth_constant(), hp.g);
}

Json hyperparams_json(const HyperParams& hp) {
  Json j;
  j["order"] = to_string(hp.order);
  j["T"] = hp.horizon;
  j["b"] = hp.b;
  j["s"] = hp.s;
  j["p_moment"] = hp.moment_index;
  j["G"] = hp.g;
  j["alpha"] = hp.alpha;
  j["beta"] = hp.beta;
  j["eta"] = hp.eta;
  j["tau"] = hp.tau;
  j["delta"] = hp.delta;
  return j;
}

Json certificate_json(const Setup& s) {
  Json j;
  j["schedule"] = hyperparams_json(s.hp);
  Json c;
  c["D_delta"] = s.cert.d_delta;
  c["K"] = s.cert.k;
  c["Z"] = s.cert.z;
  c["burn_in_raw"] = s.cert.burn_in_raw;
  c["burn_in"] = s.cert.burn_in;
  c["m_threshold"] = s.cert.m_threshold;
  c["eps_bound"] = s.cert.eps_bound;
  c["grad_bound"] = s.cert.grad_bound;
  j["certificate"] = c;
  Json cal;
  cal["G"] = s.calibration.g;
  cal["total_moment"] = s.calibration.total_moment;
  cal["noise_moment"] = s.calibration.noise_moment;
  cal["samples"] = s.calibration.samples;
  cal["safety"] = s.calibration.safety;
  j["calibration"] = cal;
  j["L"] = s.problem.smoothness;
  j["rho"] = s.problem.second_order_smoothness;
  j["C"] = s.problem.space.smooth_constant();
  return j;
}

Json summary_json(const Trajectory& t) {
  const TrajectorySummary& s = t.summary;
  Json j;
  j["seed"] = t.seed;
  j["warmup"] = to_string(t.warmup);
  j["steps"] = t.records.size();
  j["initial_f"] = s.initial_f;
  j["final_f"] = s.final_f;
  j["min_grad_norm"] = s.min_grad_norm;
  j["avg_grad_norm"] = s.avg_grad_norm;
  j["selected_output"] = s.selected_output;
  j["last_violation"] = s.last_violation;
  j["last_iterate_ok"] = s.last_iterate_ok;
  j["descent_checked"] = s.descent_checked;
  j["descent_violations"] = s.descent_violations;
  j["eps_checked"] = s.eps_checked;
  j["eps_violations"] = s.eps_violations;
  j["clip_count"] = s.clip_count;
  j["max_step_length_error"] = s.max_step_length_error;
  j["max_momentum_ratio"] = s.max_momentum_ratio;
  j["final_point"] = t.final_point;
  return j;
}

void write_trajectory_files(const fs::path& dir, const Setup& setup, const Trajectory& t) {
  prepare_dir(dir);
  std::ostringstream csv;
  write_trajectory_csv(csv, t.records);
  write_text(dir / "trajectory.csv", csv.str());
  write_text(dir / "certificate.json", certificate_json(setup).dump(2) + "\n");
  write_text(dir / "summary.json", summary_json(t).dump(2) + "\n");
  if (!setup.config.plots) return;
  Series f{"F(w_t)"}, g{"||grad F(w_t)||_*"}, m{"||m_t||_*"};
  for (const StepRecord& r : t.records) {
    const auto x = static_cast<double>(r.t);
    f.x.push_back(x);
    f.y.push_back(r.f);
    g.x.push_back(x);
    g.y.push_back(r.grad_norm);
    m.x.push_back(x);
    m.y.push_back(r.m_norm);
  }
  write_text(dir / "f.svg", svg_line_chart({f}, {.title = fmt::format("F vs t (seed {})", t.seed),
                                                 .x_label = "t",
                                                 .y_label = "F"}));
  write_text(dir / "grad_norm.svg",
             svg_line_chart({g, m}, {.title = fmt::format("gradient norm vs t (seed {})", t.seed),
                                     .x_label = "t",
                                     .y_label = "norm",
                                     .log_x = true,
                                     .log_y = true}));
}

std::vector<std::string> trajectory_failures(const Trajectory& t) {
  std::vector<std::string> out;
  if (static_cast<std::int64_t>(t.records.size()) != t.hp.horizon) {
    out.push_back(fmt::format("seed {}: {} records, expected {}", t.seed, t.records.size(),
                              t.hp.horizon));
  }
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    if (t.records[i].t != static_cast<std::int64_t>(i) + 1) {
      out.push_back(fmt::format("seed {}: step index not monotone at row {}", t.seed, i + 1));
      break;
    }
  }
  if (t.summary.max_step_length_error > 1e-9) {
    out.push_back(fmt::format("seed {}: step length off by {:.3g} (relative)", t.seed,
                              t.summary.max_step_length_error));
  }
  if (t.summary.max_momentum_ratio > 1.0 + 1e-12) {
    out.push_back(fmt::format("seed {}: ||m_t|| reached {:.17g} tau", t.seed,
                              t.summary.max_momentum_ratio));
  }
  return out;
}

double mean(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace

Setup prepare(const RunConfig& config) {
  validate(config);
  Setup s{.config = config, .problem = make_problem(config), .noise = make_noise(config)};
  auto seq = seed_words(config.seed, 0x6361u);
  Rng rng(seq);
  s.calibration = calibrate_moment_bound(s.problem, s.noise, config.calibration_samples,
                                         config.safety, rng);
  s.hp = make_schedule(config, s.calibration.g);
  s.cert = make_certificate(s.problem, s.hp);
  return s;
}

Setup with_schedule(const Setup& base, std::int64_t horizon, Order order) {
  Setup s = base;
  s.config.horizon = horizon;
  s.config.algorithm = order;
  s.hp = make_schedule(s.config, s.calibration.g);
  s.cert = make_certificate(s.problem, s.hp);
  return s;
}

RunReport run(const RunConfig& config, bool write_files) {
  RunReport report{.setup = prepare(config)};
  const Setup& setup = report.setup;
  const fs::path out(config.out_dir);
  if (write_files) {
    prepare_dir(out);
    write_text(out / "config.ini", config_echo(setup.config));
  }
  const auto n = static_cast<std::size_t>(config.n_seeds);
  report.trajectories.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const std::uint64_t seed = config.seed + i;
    Trajectory t = run_trajectory(setup.problem, setup.noise, setup.hp, setup.cert,
                                  config.warmup, seed);
    if (write_files) {
      write_trajectory_files(n > 1 ? out / fmt::format("seed_{}", seed) : out, setup, t);
    }
    report.trajectories[i] = std::move(t);
  });
  for (const Trajectory& t : report.trajectories) {
    for (std::string& f : trajectory_failures(t)) report.failures.push_back(std::move(f));
  }
  if (write_files && n > 1) {
    Json j;
    j["seeds"] = Json::array();
    for (const Trajectory& t : report.trajectories) j["seeds"].push_back(summary_json(t));
    j["failures"] = report.failures;
    write_text(out / "summary.json", j.dump(2) + "\n");
  }
  return report;
}

std::vector<TrajectorySummary> run_summaries(const Setup& setup, WarmupMode warmup,
                                             std::int64_t n_seeds) {
  std::vector<TrajectorySummary> out(static_cast<std::size_t>(n_seeds));
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = run_trajectory(setup.problem, setup.noise, setup.hp, setup.cert, warmup,
                            setup.config.seed + i)
                 .summary;
  });
  return out;
}

SweepReport rate_sweep(const RunConfig& config, bool write_files) {
  RunConfig c = config;
  c.horizon = config.t_grid.front();  // alpha <= 1 must hold at the shortest horizon
  SweepReport report{.setup = prepare(c)};
  const std::size_t n_t = config.t_grid.size();
  const auto n_s = static_cast<std::size_t>(config.n_seeds);
  std::vector<Setup> setups;
  for (std::int64_t t : config.t_grid) {
    setups.push_back(with_schedule(report.setup, t, config.algorithm));
  }
  std::vector<TrajectorySummary> runs(n_t * n_s);
  // Longest horizons first so the pool drains evenly.
  parallel_for(runs.size(), [&](std::size_t k) {
    const std::size_t ti = n_t - 1 - k / n_s;
    const std::size_t si = k % n_s;
    const Setup& s = setups[ti];
    runs[ti * n_s + si] = run_trajectory(s.problem, s.noise, s.hp, s.cert, config.warmup,
                                         config.seed + si)
                              .summary;
  });
  std::vector<double> ts, avg, mins;
  for (std::size_t ti = 0; ti < n_t; ++ti) {
    std::vector<double> a, m;
    for (std::size_t si = 0; si < n_s; ++si) {
      a.push_back(runs[ti * n_s + si].avg_grad_norm);
      m.push_back(runs[ti * n_s + si].min_grad_norm);
    }
    report.rows.push_back({config.t_grid[ti], mean(a), sample_sd(a), mean(m)});
    ts.push_back(static_cast<double>(config.t_grid[ti]));
    avg.push_back(mean(a));
    mins.push_back(mean(m));
  }
  report.fit = fit_rate_exponent(ts, avg);
  report.min_fit = fit_rate_exponent(ts, mins);
  report.target_slope = -rate_exponent(config.moment_index, config.algorithm);

  if (write_files) {
    const fs::path out(config.out_dir);
    prepare_dir(out);
    write_text(out / "config.ini", config_echo(config));
    std::string csv = "T,seeds,avg_grad_norm,avg_grad_norm_sd,min_grad_norm\n";
    for (const SweepRow& r : report.rows) {
      csv += fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", r.horizon, n_s, r.avg_grad_norm,
                         r.avg_grad_norm_sd, r.min_grad_norm);
    }
    write_text(out / "rate_sweep.csv", csv);
    Json j;
    j["algo"] = to_string(config.algorithm);
    j["seeds"] = n_s;
    j["G"] = report.setup.calibration.g;
    j["target_slope"] = report.target_slope;
    j["slope"] = report.fit.slope;
    j["slope_stderr"] = report.fit.stderr_slope;
    j["intercept"] = report.fit.intercept;
    j["min_slope"] = report.min_fit.slope;
    j["min_slope_stderr"] = report.min_fit.stderr_slope;
    write_text(out / "rate_sweep.json", j.dump(2) + "\n");
    if (config.plots) {
      Series pts{"seed-averaged (1/T) sum ||grad F||", ts, avg, true};
      Series line{fmt::format("fit slope {:.3f} (target {:.3f})", report.fit.slope,
                              report.target_slope)};
      for (double t : ts) {
        line.x.push_back(t);
        line.y.push_back(std::exp(report.fit.intercept + report.fit.slope * std::log(t)));
      }
      write_text(out / "rate_fit.svg",
                 svg_line_chart({pts, line}, {.title = "rate fit",
                                              .x_label = "T",
                                              .y_label = "average gradient norm",
                                              .log_x = true,
                                              .log_y = true}));
    }
  }
  return report;
}

namespace {

ModeStats mode_stats(WarmupMode mode, std::vector<TrajectorySummary> runs) {
  ModeStats m{.mode = mode, .runs = std::move(runs)};
  std::vector<double> f, g;
  m.descent_violations = 0;
  for (const TrajectorySummary& s : m.runs) {
    f.push_back(s.final_f);
    g.push_back(s.min_grad_norm);
    m.descent_violations += s.descent_violations;
  }
  const double root_n = std::sqrt(static_cast<double>(std::max<std::size_t>(m.runs.size(), 1)));
  m.final_f_mean = mean(f);
  m.final_f_half_width = 1.96 * sample_sd(f) / root_n;
  m.min_grad_mean = mean(g);
  m.min_grad_half_width = 1.96 * sample_sd(g) / root_n;
  return m;
}

Json mode_json(const ModeStats& m) {
  Json j;
  j["mode"] = to_string(m.mode);
  j["final_f_mean"] = m.final_f_mean;
  j["final_f_band"] = {m.final_f_mean - m.final_f_half_width, m.final_f_mean + m.final_f_half_width};
  j["min_grad_norm_mean"] = m.min_grad_mean;
  j["min_grad_norm_band"] = {m.min_grad_mean - m.min_grad_half_width,
                             m.min_grad_mean + m.min_grad_half_width};
  j["descent_violations"] = m.descent_violations;
  return j;
}

}  // namespace

BurnInReport burn_in_compare(const RunConfig& config, bool write_files) {
  BurnInReport report{.setup = prepare(config)};
  const Setup& s = report.setup;
  report.none = mode_stats(WarmupMode::none, run_summaries(s, WarmupMode::none, config.n_seeds));
  report.hold = mode_stats(WarmupMode::hold, run_summaries(s, WarmupMode::hold, config.n_seeds));
  report.batch_size = std::min<std::int64_t>(5, config.n_seeds);
  report.batches = config.n_seeds / report.batch_size;
  report.hold_not_worse = 0;
  for (std::int64_t b = 0; b < report.batches; ++b) {
    std::int64_t vn = 0, vh = 0;
    for (std::int64_t i = b * report.batch_size; i < (b + 1) * report.batch_size; ++i) {
      vn += report.none.runs[static_cast<std::size_t>(i)].descent_violations;
      vh += report.hold.runs[static_cast<std::size_t>(i)].descent_violations;
    }
    if (vh <= vn) ++report.hold_not_worse;
  }
  if (write_files) {
    const fs::path out(config.out_dir);
    prepare_dir(out);
    write_text(out / "config.ini", config_echo(config));
    std::string csv = "mode,seed,final_f,min_grad_norm,descent_checked,descent_violations\n";
    for (const ModeStats* m : {&report.none, &report.hold}) {
      for (std::size_t i = 0; i < m->runs.size(); ++i) {
        const TrajectorySummary& r = m->runs[i];
        csv += fmt::format("{},{},{:.17g},{:.17g},{},{}\n", to_string(m->mode), config.seed + i,
                           r.final_f, r.min_grad_norm, r.descent_checked, r.descent_violations);
      }
    }
    write_text(out / "burn_in.csv", csv);
    Json j;
    j["burn_in"] = s.cert.burn_in;
    j["m_threshold"] = s.cert.m_threshold;
    j["seeds"] = config.n_seeds;
    j["modes"] = {mode_json(report.none), mode_json(report.hold)};
    j["batch_size"] = report.batch_size;
    j["batches"] = report.batches;
    j["hold_not_worse_batches"] = report.hold_not_worse;
    write_text(out / "burn_in.json", j.dump(2) + "\n");
  }
  return report;
}

OptimizerInvariants check_optimizer_invariants(const ProblemSpec& problem,
                                               const NoiseModel& noise, const HyperParams& hp,
                                               std::uint64_t seed) {
  const BurnInCertificate cert = make_certificate(problem, hp);
  const Trajectory t = run_trajectory(problem, noise, hp, cert, WarmupMode::none, seed);
  const auto steps = static_cast<std::int64_t>(t.records.size());
  OptimizerInvariants out;
  out.momentum_ball = {.name = "momentum_ball", .samples = steps,
                       .worst = t.summary.max_momentum_ratio,
                       .note = "max ||m_t||_* / tau"};
  if (t.summary.max_momentum_ratio > 1.0 + 1e-12) out.momentum_ball.violations = 1;
  out.step_length = {.name = "step_length", .samples = steps,
                     .worst = t.summary.max_step_length_error,
                     .note = "max relative error of ||w_{t+1} - w_t|| vs eta_t"};
  if (t.summary.max_step_length_error > 1e-9) out.step_length.violations = 1;
  const double expected_tau = hp.g / std::pow(hp.alpha, 1.0 / hp.moment_index);
  const double rel = std::abs(hp.tau - expected_tau) / expected_tau;
  out.tau_consistency = {.name = "tau_consistency", .samples = 1, .worst = rel,
                         .note = "relative gap between tau and G / alpha^(1/p)"};
  if (rel > 1e-12) out.tau_consistency.violations = 1;
  return out;
}

bool VerifyReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass(); });
}

namespace {

// Gaussian vector with a random overall scale in [1e-2, 1e2] and some exact zeros.
std::vector<double> random_vector(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double scale = std::pow(10.0, 4.0 * unif(rng) - 2.0);
  std::vector<double> v(dim);
  bool any = false;
  for (double& c : v) {
    c = unif(rng) < 0.1 ? 0.0 : scale * normal(rng);
    any = any || c != 0.0;
  }
  if (!any) v[0] = scale;
  return v;
}

std::vector<double> uniform_box(std::size_t dim, double half_width, Rng& rng) {
  std::uniform_real_distribution<double> unif(-half_width, half_width);
  std::vector<double> v(dim);
  for (double& c : v) c = unif(rng);
  return v;
}

void record(CheckResult& c, bool bad, double worst_candidate, bool lower_is_worse) {
  ++c.samples;
  if (bad) ++c.violations;
  if (c.samples == 1) {
    c.worst = worst_candidate;
  } else {
    c.worst = lower_is_worse ? std::min(c.worst, worst_candidate)
                             : std::max(c.worst, worst_candidate);
  }
}

void normed_space_checks(std::vector<CheckResult>& out, Rng& rng) {
  std::uniform_int_distribution<std::size_t> dim_dist(1, 20);
  CheckResult duality{.name = "duality_map", .note = "max relative error, r in {1.2,1.5,2,3,4}"};
  for (double r : {1.2, 1.5, 2.0, 3.0, 4.0}) {
    for (int i = 0; i < 25000; ++i) {
      const NormedSpace sp = NormedSpace::from_dual_exponent(dim_dist(rng), r);
      const DualVector v(sp, random_vector(sp.dim(), rng));
      const PrimalVector d = duality_map(v);
      const double nv = dual_norm(v);
      const double e1 = std::abs(primal_norm(d) - 1.0);
      const double e2 = std::abs(pairing(v, d) - nv) / nv;
      const double e = std::max(e1, e2);
      record(duality, e > 1e-10, e, false);
    }
  }
  out.push_back(duality);

  CheckResult clip{.name = "clip_dual", .note = "max relative excess of ||clip(v)|| over tau"};
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    const double r = 2.0 + 4.0 * unif(rng);
    const NormedSpace sp = NormedSpace::from_dual_exponent(dim_dist(rng), r);
    const DualVector v(sp, random_vector(sp.dim(), rng));
    const double tau = std::pow(10.0, 4.0 * unif(rng) - 2.0);
    const DualVector c = clip_dual(v, tau);
    const double nc = dual_norm(c);
    const double nv = dual_norm(v);
    bool bad = nc > tau * (1.0 + 1e-12);
    bad = bad || !(clip_dual(c, tau) == c);
    if (nv <= tau) bad = bad || !(c == v);
    for (std::size_t k = 0; k < sp.dim() && !bad; ++k) {
      bad = std::abs(c[k] * nv - v[k] * nc) > 1e-12 * nv * nc;
    }
    record(clip, bad, nc / tau - 1.0, false);
  }
  out.push_back(clip);

  CheckResult holder{.name = "holder", .note = "min of ||v|| ||w|| - |<v, w>|, relative"};
  for (int i = 0; i < 100000; ++i) {
    const double q = 1.05 + 0.95 * unif(rng);
    const NormedSpace sp(dim_dist(rng), q);
    const DualVector v(sp, random_vector(sp.dim(), rng));
    const PrimalVector w(sp, random_vector(sp.dim(), rng));
    const double rhs = dual_norm(v) * primal_norm(w);
    const double res = (rhs - std::abs(pairing(v, w))) / rhs;
    record(holder, res < -1e-12, res, true);
  }
  out.push_back(holder);

  for (double r : {2.0, 3.0, 4.0, 6.0}) {
    CheckResult smooth{.name = fmt::format("smooth_norm_r{}", r),
                       .note = fmt::format("min residual, C = {}", r - 1.0)};
    for (int i = 0; i < 10000; ++i) {
      const NormedSpace sp = NormedSpace::from_dual_exponent(dim_dist(rng), r);
      const DualVector x(sp, random_vector(sp.dim(), rng));
      const DualVector y(sp, random_vector(sp.dim(), rng));
      const double scale = std::max(1.0, dual_norm(x) * dual_norm(x) + dual_norm(y) * dual_norm(y));
      const double res = verify_smooth_norm(x, y) / scale;
      record(smooth, res < -kResidualTolerance, res, true);
    }
    out.push_back(smooth);
  }
}

std::vector<ProblemSpec> verify_problems(double q) {
  const NormedSpace sp(10, q);
  std::vector<double> eig, opt;
  for (int i = 1; i <= 10; ++i) {
    eig.push_back(0.5 * i);
    opt.push_back(0.1 * i - 0.5);
  }
  return {make_quadratic(sp, eig, opt, std::vector<double>(10, 1.0)),
          make_cosine_sum(sp, 1.5, std::vector<double>(10, 1.0))};
}

void analysis_checks(std::vector<CheckResult>& out, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  CheckResult grad_fd{.name = "gradient_finite_difference", .note = "max relative error"};
  CheckResult hvp_fd{.name = "hessian_vector_finite_difference", .note = "max relative error"};
  CheckResult upper{.name = "smooth_upper", .note = "min residual, scaled by max(1, |F|)"};
  CheckResult taylor_v{.name = "taylor_value", .note = "min residual, scaled by max(1, |F|)"};
  CheckResult taylor_g{.name = "taylor_gradient", .note = "min residual, scaled"};
  CheckResult one_step{.name = "one_step_progress", .note = "min residual, scaled by max(1, |F|)"};
  const double h = 1e-5;
  for (double q : {2.0, 1.5}) {
    for (const ProblemSpec& p : verify_problems(q)) {
      const NormedSpace& sp = p.space;
      for (int i = 0; i < 1000; ++i) {
        const std::vector<double> w = uniform_box(sp.dim(), 3.0, rng);
        const PrimalVector pw(sp, w);
        const DualVector g = true_gradient(p, pw);
        const std::vector<double> dir = uniform_box(sp.dim(), 1.0, rng);
        const PrimalVector pd(sp, dir);
        const DualVector hv = hessian_vector_product(p, pw, pd);
        std::vector<double> wp = w, wm = w;
        double err_g = 0.0;
        for (std::size_t k = 0; k < sp.dim(); ++k) {
          wp[k] += h;
          wm[k] -= h;
          const double fd =
              (objective(p, PrimalVector(sp, wp)) - objective(p, PrimalVector(sp, wm))) / (2 * h);
          err_g = std::max(err_g, std::abs(fd - g[k]) / (1.0 + std::abs(g[k])));
          wp[k] = w[k];
          wm[k] = w[k];
        }
        record(grad_fd, err_g > 1e-6, err_g, false);
        std::vector<double> ap(sp.dim()), am(sp.dim());
        for (std::size_t k = 0; k < sp.dim(); ++k) {
          ap[k] = w[k] + h * dir[k];
          am[k] = w[k] - h * dir[k];
        }
        const DualVector gp = true_gradient(p, PrimalVector(sp, ap));
        const DualVector gm = true_gradient(p, PrimalVector(sp, am));
        double err_h = 0.0;
        for (std::size_t k = 0; k < sp.dim(); ++k) {
          const double fd = (gp[k] - gm[k]) / (2 * h);
          err_h = std::max(err_h, std::abs(fd - hv[k]) / (1.0 + std::abs(hv[k])));
        }
        record(hvp_fd, err_h > 1e-6, err_h, false);
      }
      for (int i = 0; i < 10000; ++i) {
        const PrimalVector x(sp, uniform_box(sp.dim(), 3.0, rng));
        const PrimalVector y(sp, uniform_box(sp.dim(), 3.0, rng));
        const double scale =
            std::max({1.0, std::abs(objective(p, x)), std::abs(objective(p, y))});
        const double r1 = check_smooth_upper(p, x, y) / scale;
        record(upper, r1 < -kResidualTolerance, r1, true);
        const TaylorResiduals tr = check_second_order_taylor(p, x, y);
        record(taylor_v, tr.value / scale < -kResidualTolerance, tr.value / scale, true);
        const double gs = std::max(1.0, dual_norm(true_gradient(p, x)) * 10.0);
        record(taylor_g, tr.gradient / gs < -kResidualTolerance, tr.gradient / gs, true);

        std::vector<double> gstar(sp.dim());
        const DualVector gx = true_gradient(p, x);
        const std::vector<double> noise = random_vector(sp.dim(), rng);
        for (std::size_t k = 0; k < sp.dim(); ++k) gstar[k] = gx[k] + noise[k];
        const double eta = std::pow(10.0, -4.0 + 4.0 * unif(rng));
        const double r2 = check_one_step(p, x, DualVector(sp, gstar), eta) / scale;
        record(one_step, r2 < -kResidualTolerance, r2, true);
      }
    }
  }
  for (CheckResult* c : {&grad_fd, &hvp_fd, &upper, &taylor_v, &taylor_g, &one_step}) {
    out.push_back(*c);
  }
}

// Bounds must be non-increasing in delta and non-decreasing in R and sigma.
CheckResult monotonicity_check() {
  CheckResult c{.name = "bound_monotonicity", .note = "grid over delta, R, sigma, C"};
  const std::vector<double> deltas{0.001, 0.01, 0.05, 0.1, 0.3, 0.6, 0.9};
  const std::vector<double> rs{0.1, 1.0, 3.0, 10.0, 100.0};
  auto eval = [](int which, double r, double sigma, double delta, double cc) {
    const std::vector<double> s(50, sigma);
    const std::vector<double> s2(50, sigma * sigma);
    switch (which) {
      case 0: return freedman_scalar_bound(r, s2, delta);
      case 1: return freedman_hilbert_bound(r, s, delta);
      default: return freedman_banach_bound(r, s, delta, cc, 2.0);
    }
  };
  for (int which = 0; which < 3; ++which) {
    for (double r : rs) {
      for (double sigma : rs) {
        for (std::size_t k = 1; k < deltas.size(); ++k) {
          const double lo = eval(which, r, sigma, deltas[k], 2.0);
          const double hi = eval(which, r, sigma, deltas[k - 1], 2.0);
          record(c, lo > hi * (1 + 1e-15), hi - lo, true);
        }
        for (double delta : deltas) {
          const double a = eval(which, r, sigma, delta, 2.0);
          record(c, eval(which, 2 * r, sigma, delta, 2.0) < a, 0.0, true);
          record(c, eval(which, r, 2 * sigma, delta, 2.0) < a, 0.0, true);
          if (which == 2) {
            record(c, eval(which, r, sigma, delta, 3.0) < a, 0.0, true);
            // C = 1, p = 2 dominates the Hilbert-space bound.
            record(c, eval(2, r, sigma, delta, 1.0) < eval(1, r, sigma, delta, 1.0), 0.0, true);
          }
        }
      }
    }
  }
  return c;
}

void concentration_checks(std::vector<CheckResult>& out, const RunConfig& config, Rng& rng) {
  for (double r : {2.0, 3.0}) {
    const NormedSpace sp = NormedSpace::from_dual_exponent(5, r);
    CheckResult sb{.name = fmt::format("s_sequence_increment_r{}", r),
                   .note = "|s_t| <= ||X_t||, counted per draw"};
    CheckResult mj{.name = fmt::format("s_sequence_majorant_r{}", r),
                   .note = "min of majorant - ||sum X||"};
    for (std::size_t len : {1, 10, 100}) {
      const MajorantSweep m = majorant_sweep(sp, len, 10000, config.seed + len);
      sb.samples += m.streams * static_cast<std::int64_t>(len);
      sb.violations += m.s_bound_violations;
      mj.worst = mj.samples == 0 ? m.worst_margin : std::min(mj.worst, m.worst_margin);
      mj.samples += m.streams;
      mj.violations += m.majorant_violations;
    }
    out.push_back(sb);
    out.push_back(mj);
  }

  CheckResult pm{.name = "power_mean", .note = "min residual"};
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 20);
  for (int i = 0; i < 100000; ++i) {
    std::vector<double> xs(static_cast<std::size_t>(len(rng)));
    for (double& x : xs) x = std::pow(10.0, 4.0 * unif(rng) - 2.0);
    const double p = 0.2 + 3.0 * unif(rng);
    const double q = p + 3.0 * unif(rng);
    const double res = power_mean_check(xs, p, q);
    record(pm, res < -1e-12 * (1.0 + xs.size()), res, true);
  }
  out.push_back(pm);
  out.push_back(monotonicity_check());

  CoverageSuiteParams params;
  params.delta = config.delta;
  params.trials = config.coverage_trials;
  params.length = static_cast<std::size_t>(config.stream_length);
  params.seed = config.seed;
  for (const LemmaCoverage& row : run_coverage_suite(params)) {
    out.push_back({.name = "coverage_" + row.lemma,
                   .samples = row.result.trials,
                   .violations = row.result.pass() ? 0 : 1,
                   .worst = row.result.coverage,
                   .note = fmt::format("coverage {:.4f}, band [{:.4f}, {:.4f}], level {:.3f}",
                                       row.result.coverage, row.result.ci.low,
                                       row.result.ci.high, row.result.level)});
  }

  // Truncation bias and variance over a tau grid for symmetric and one-sided
  // Pareto(1.8, 1), p = 1.5, G^p = 6.
  const double a = 1.8, p = 1.5;
  const double g = std::pow(pareto_moment(a, 1.0, p), 1.0 / p);
  const std::vector<double> taus{2.0, 5.0, 10.0, 20.0, 50.0};
  CheckResult bias{.name = "truncation_bias", .note = "max of estimate - bound - 3 se"};
  CheckResult var{.name = "truncation_variance", .note = "max of estimate - bound - 3 se"};
  CheckResult mono{.name = "truncation_bias_monotone", .note = "one-sided Pareto, tau grid"};
  for (bool symmetric : {true, false}) {
    const std::vector<double> mu{symmetric ? 0.0 : a / (a - 1.0)};
    VectorSampler sampler = [&, symmetric](Rng& r) {
      const double x = sample_pareto_radius(a, 1.0, r);
      if (!symmetric) return std::vector<double>{x};
      std::bernoulli_distribution coin(0.5);
      return std::vector<double>{coin(r) ? x : -x};
    };
    double prev = 0.0, prev_se = 0.0;
    for (std::size_t k = 0; k < taus.size(); ++k) {
      const BiasVariance bv = truncation_bias_variance_mc(sampler, mu, taus[k], 100000, rng);
      const double eb = bv.bias - truncation_bias_bound(g, taus[k], p) - 3 * bv.bias_stderr;
      const double ev =
          bv.variance - truncation_variance_bound(g, taus[k], p) - 3 * bv.variance_stderr;
      record(bias, eb > 0.0, eb, false);
      record(var, ev > 0.0, ev, false);
      if (!symmetric && k > 0) {
        const double slack = 3 * std::hypot(bv.bias_stderr, prev_se);
        record(mono, bv.bias > prev + slack, bv.bias - prev, false);
      }
      prev = bv.bias;
      prev_se = bv.bias_stderr;
    }
  }
  out.push_back(bias);
  out.push_back(var);
  out.push_back(mono);
}

void optimizer_checks(std::vector<CheckResult>& out, const RunConfig& config) {
  RunConfig c = config;
  c.horizon = 2000;
  c.n_seeds = 1;
  c.calibration_samples = std::min<std::int64_t>(c.calibration_samples, 20000);
  for (Order order : {Order::first, Order::second}) {
    c.algorithm = order;
    std::optional<Setup> prepared;
    try {
      prepared = prepare(c);
    } catch (const ConfigError& e) {
      out.push_back({.name = "optimizer_setup_" + to_string(order), .samples = 1,
                     .violations = 1, .note = e.what()});
      continue;
    }
    const Setup& s = *prepared;
    const OptimizerInvariants inv = check_optimizer_invariants(s.problem, s.noise, s.hp, c.seed);
    for (CheckResult r : {inv.momentum_ball, inv.step_length, inv.tau_consistency}) {
      r.name += "_" + to_string(order);
      out.push_back(r);
    }
    std::ostringstream a, b;
    write_trajectory_csv(a, run_trajectory(s.problem, s.noise, s.hp, s.cert, WarmupMode::none,
                                           c.seed).records);
    write_trajectory_csv(b, run_trajectory(s.problem, s.noise, s.hp, s.cert, WarmupMode::none,
                                           c.seed).records);
    out.push_back({.name = "determinism_" + to_string(order), .samples = 1,
                   .violations = a.str() == b.str() ? 0 : 1,
                   .note = "same seed, byte-identical CSV"});
  }
  c.algorithm = Order::first;
  Setup s = prepare(c);
  HyperParams hp = s.hp;
  hp.alpha = 1.0;
  hp.beta = 0.0;
  hp.tau = hp.g;
  std::ostringstream a, b;
  write_trajectory_csv(a, run_trajectory(s.problem, s.noise, hp, s.cert, WarmupMode::none, c.seed)
                              .records);
  hp.order = Order::second;
  write_trajectory_csv(b, run_trajectory(s.problem, s.noise, hp, s.cert, WarmupMode::none, c.seed)
                              .records);
  out.push_back({.name = "nigt_beta0_equals_nsgd", .samples = 1,
                 .violations = a.str() == b.str() ? 0 : 1,
                 .note = "beta = 0, same stream, byte-identical CSV"});
}

}  // namespace

VerifyReport verify(const RunConfig& config, bool write_files) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  VerifyReport report;
  auto seq = seed_words(config.seed, 0x7665u);
  Rng rng(seq);
  normed_space_checks(report.checks, rng);
  analysis_checks(report.checks, rng);
  concentration_checks(report.checks, config, rng);
  optimizer_checks(report.checks, config);
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (write_files) {
    const fs::path out(config.out_dir);
    prepare_dir(out);
    write_text(out / "config.ini", config_echo(config));
    Json j;
    j["pass"] = report.ok();
    j["checks"] = Json::array();
    for (const CheckResult& c : report.checks) {
      j["checks"].push_back({{"name", c.name},
                             {"samples", c.samples},
                             {"violations", c.violations},
                             {"worst", c.worst},
                             {"note", c.note},
                             {"pass", c.pass()}});
    }
    write_text(out / "verify.json", j.dump(2) + "\n");
  }
  return report;
}

bool ConcentrationReport::ok() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const LemmaCoverage& r) { return r.result.pass(); });
}

ConcentrationReport concentration(const RunConfig& config, bool write_files) {
  validate(config);
  CoverageSuiteParams params;
  params.delta = config.delta;
  params.trials = config.coverage_trials;
  params.length = static_cast<std::size_t>(config.stream_length);
  params.seed = config.seed;
  ConcentrationReport report{run_coverage_suite(params)};
  if (write_files) {
    const fs::path out(config.out_dir);
    prepare_dir(out);
    write_text(out / "config.ini", config_echo(config));
    write_text(out / "concentration.csv", coverage_csv(report.rows));
  }
  return report;
}

}  // namespace clipnorm
