// clipnorm command-line driver.
//
//   clipnorm run          one or more seeded trajectories
//   clipnorm rate-sweep   seed-averaged gradient norms over sweep.T_grid
//   clipnorm burn-in      warmup none vs hold
//   clipnorm verify       invariant suite
//   clipnorm concentration  coverage of the concentration bounds
//
// CLIPNORM_THREADS sets the worker count (default 1).

#include <fmt/format.h>

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "clipnorm/harness.hpp"
#include "clipnorm/parallel.hpp"

namespace {

using namespace clipnorm;

struct Flags {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_run_flags(CLI::App* app, Flags& flags) {
  app->add_option("--config", flags.config_path, "config file (key = value, [section]s)");
  struct Entry {
    const char* flag;
    const char* key;
    const char* help;
  };
  static const Entry entries[] = {
      {"--algo", "run.algo", "nsgd | nigt"},
      {"--problem", "problem.kind", "quadratic | cosine_sum"},
      {"--q", "norm.q", "primal exponent in (1, 2]"},
      {"--p-moment", "noise.p_moment", "noise moment index in (1, 2]"},
      {"--T", "run.T", "horizon"},
      {"--b", "run.b", "momentum scale"},
      {"--s", "run.s", "step-size scale"},
      {"--delta", "run.delta", "failure probability"},
      {"--seed", "run.seed", "base seed"},
      {"--seeds", "run.seeds", "number of seeds (base + i)"},
      {"--warmup", "run.warmup", "none | hold"},
      {"--out", "run.out", "output directory"},
  };
  for (const Entry& e : entries) {
    app->add_option_function<std::string>(
        e.flag, [&flags, key = std::string(e.key)](const std::string& v) { flags.overrides[key] = v; },
        e.help);
  }
}

RunConfig resolve(const Flags& flags) {
  RunConfig c = flags.config_path.empty() ? RunConfig{} : load_config_file(flags.config_path);
  apply_settings(c, flags.overrides);
  validate(c);
  return c;
}

int cmd_run(const RunConfig& c) {
  const RunReport r = run(c);
  for (const Trajectory& t : r.trajectories) {
    fmt::print("seed {}: F {:.6g} -> {:.6g}, min ||grad F|| {:.4g}, avg {:.4g}, output t = {}\n",
               t.seed, t.summary.initial_f, t.summary.final_f, t.summary.min_grad_norm,
               t.summary.avg_grad_norm, t.summary.selected_output);
  }
  fmt::print("G = {:.6g}, alpha = {:.4g}, eta = {:.4g}, tau = {:.4g}, burn-in = {}\n",
             r.setup.hp.g, r.setup.hp.alpha, r.setup.hp.eta, r.setup.hp.tau, r.setup.cert.burn_in);
  for (const std::string& f : r.failures) fmt::print(stderr, "invariant failure: {}\n", f);
  fmt::print("wrote {}\n", c.out_dir);
  return r.ok() ? kExitOk : kExitInvariant;
}

int cmd_sweep(const RunConfig& c) {
  const SweepReport r = rate_sweep(c);
  fmt::print("{:>10} {:>16} {:>12} {:>16}\n", "T", "avg ||grad F||", "sd", "min ||grad F||");
  for (const SweepRow& row : r.rows) {
    fmt::print("{:>10} {:>16.6g} {:>12.4g} {:>16.6g}\n", row.horizon, row.avg_grad_norm,
               row.avg_grad_norm_sd, row.min_grad_norm);
  }
  fmt::print("slope {:.4f} +- {:.4f} (target {:.4f}); min-norm slope {:.4f}\n", r.fit.slope,
             r.fit.stderr_slope, r.target_slope, r.min_fit.slope);
  fmt::print("wrote {}\n", c.out_dir);
  return kExitOk;
}

int cmd_burn_in(const RunConfig& c) {
  const BurnInReport r = burn_in_compare(c);
  fmt::print("burn-in {} steps, momentum threshold {:.4g}\n", r.setup.cert.burn_in,
             r.setup.cert.m_threshold);
  for (const ModeStats* m : {&r.none, &r.hold}) {
    fmt::print("{:>5}: final F {:.6g} +- {:.3g}, min ||grad F|| {:.4g} +- {:.3g}, descent "
               "violations {}\n",
               to_string(m->mode), m->final_f_mean, m->final_f_half_width, m->min_grad_mean,
               m->min_grad_half_width, m->descent_violations);
  }
  fmt::print("hold <= none on {}/{} batches of {} seeds\n", r.hold_not_worse, r.batches,
             r.batch_size);
  fmt::print("wrote {}\n", c.out_dir);
  return kExitOk;
}

int cmd_verify(const RunConfig& c) {
  const VerifyReport r = verify(c);
  for (const CheckResult& k : r.checks) {
    fmt::print("{:<4} {:<36} samples {:>9} violations {:>3}  worst {:.3g}  ({})\n",
               k.pass() ? "ok" : "FAIL", k.name, k.samples, k.violations, k.worst, k.note);
  }
  fmt::print("{} in {:.1f} s; wrote {}/verify.json\n", r.ok() ? "all checks passed" : "FAILED",
             r.seconds, c.out_dir);
  return r.ok() ? kExitOk : kExitInvariant;
}

int cmd_concentration(const RunConfig& c) {
  const ConcentrationReport r = concentration(c);
  for (const LemmaCoverage& row : r.rows) {
    fmt::print("{:<4} {:<22} coverage {:.4f}  band [{:.4f}, {:.4f}]  level {:.3f}\n",
               row.result.pass() ? "ok" : "FAIL", row.lemma, row.result.coverage,
               row.result.ci.low, row.result.ci.high, row.result.level);
  }
  fmt::print("wrote {}/concentration.csv\n", c.out_dir);
  return r.ok() ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clipped normalized SGD with momentum under heavy-tailed noise"};
  app.require_subcommand(1);
  app.footer(fmt::format("Environment: CLIPNORM_THREADS = worker threads (now {}).",
                         thread_count()));

  Flags flags;
  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&);
  };
  const Sub subs[] = {
      {"run", "run trajectories and write CSV, JSON and plots", cmd_run},
      {"rate-sweep", "fit the rate exponent over sweep.T_grid", cmd_sweep},
      {"burn-in", "compare warmup modes none and hold", cmd_burn_in},
      {"verify", "run the invariant suite", cmd_verify},
      {"concentration", "coverage of the concentration bounds", cmd_concentration},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> commands;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_run_flags(sub, flags);
    commands.emplace_back(sub, &s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const RunConfig config = resolve(flags);
    for (auto& [sub, s] : commands) {
      if (sub->parsed()) return s->fn(config);
    }
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitInvariant;
  }
  return kExitConfig;
}
