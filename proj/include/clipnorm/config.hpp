#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "clipnorm/optimizers.hpp"
#include "clipnorm/problems.hpp"

namespace clipnorm {

// Invalid or unknown configuration entry; field() names it as section.key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct RunConfig {
  // [run]
  Order algorithm = Order::first;
  std::int64_t horizon = 10000;
  double b = 1.0;
  double s = 1.0;
  double delta = 0.1;
  std::uint64_t seed = 1;
  std::int64_t n_seeds = 1;
  WarmupMode warmup = WarmupMode::none;
  std::string out_dir = "clipnorm_out";
  bool plots = true;

  // [problem]
  ProblemKind problem = ProblemKind::cosine_sum;
  std::size_t dim = 10;
  double amplitude = 1.0;
  std::vector<double> eigenvalues;  // empty: 1, 2, ..., dim
  std::vector<double> optimum;      // empty: zeros
  std::vector<double> initial_point;  // empty: all entries initial_fill
  double initial_fill = 2.0;

  // [noise]
  double moment_index = 1.5;
  double tail_index = 1.8;
  double noise_scale = 1.0;
  double safety = 1.5;
  std::int64_t calibration_samples = 100000;

  // [norm]
  double q = 2.0;

  // [sweep]
  std::vector<std::int64_t> t_grid{1000, 10000, 100000};

  // [concentration]
  std::int64_t coverage_trials = 10000;
  std::int64_t stream_length = 100;
};

// Flat key=value text with [section] headers; '#' and ';' start comments.
// Keys outside any section belong to [run].  Throws ConfigError.
std::map<std::string, std::string> parse_config_text(const std::string& text);

// Applies section.key -> value entries on top of `config`.
void apply_settings(RunConfig& config, const std::map<std::string, std::string>& settings);

RunConfig load_config_file(const std::string& path);

// Cross-field validation; throws ConfigError naming the offending field.
void validate(const RunConfig& config);

// Fully resolved configuration in the same text format.
std::string config_echo(const RunConfig& config);

NormedSpace make_space(const RunConfig& config);
ProblemSpec make_problem(const RunConfig& config);
NoiseModel make_noise(const RunConfig& config);

}  // namespace clipnorm
