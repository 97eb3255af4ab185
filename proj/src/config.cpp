#include "clipnorm/config.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

namespace clipnorm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& field, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a number, got '" + v + "'");
  }
}

std::int64_t to_int(const std::string& field, const std::string& v) {
  const double x = to_double(field, v);
  if (x != std::floor(x) || std::abs(x) > 9.0e15) {
    throw ConfigError(field, "expected an integer, got '" + v + "'");
  }
  return static_cast<std::int64_t>(x);
}

std::uint64_t to_seed(const std::string& field, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(field, "expected an unsigned 64-bit integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& field, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(field, "expected true/false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& field, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(field, item));
  }
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += fmt::format("{}", xs[i]);
  }
  return out;
}

template <class T>
T checked(const std::string& field, T (*parse)(const std::string&), const std::string& v) {
  try {
    return parse(v);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

Order parse_algo(const std::string& v) {
  if (v == "nsgd") return Order::first;
  if (v == "nigt") return Order::second;
  throw std::invalid_argument("unknown algorithm '" + v + "' (expected nsgd or nigt)");
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  std::string section = "run";
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(fmt::format("line {}", lineno), "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}", lineno), "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    out[section + "." + key] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_settings(RunConfig& c, const std::map<std::string, std::string>& settings) {
  for (const auto& [field, v] : settings) {
    if (field == "run.algo") {
      c.algorithm = checked(field, parse_algo, v);
    } else if (field == "run.T") {
      c.horizon = to_int(field, v);
    } else if (field == "run.b") {
      c.b = to_double(field, v);
    } else if (field == "run.s") {
      c.s = to_double(field, v);
    } else if (field == "run.delta") {
      c.delta = to_double(field, v);
    } else if (field == "run.seed") {
      c.seed = to_seed(field, v);
    } else if (field == "run.seeds") {
      c.n_seeds = to_int(field, v);
    } else if (field == "run.warmup") {
      c.warmup = checked(field, parse_warmup_mode, v);
    } else if (field == "run.out") {
      c.out_dir = v;
    } else if (field == "run.plots") {
      c.plots = to_bool(field, v);
    } else if (field == "problem.kind") {
      c.problem = checked(field, parse_problem_kind, v);
    } else if (field == "problem.dim") {
      const auto d = to_int(field, v);
      if (d < 1) throw ConfigError(field, "dimension must be positive");
      c.dim = static_cast<std::size_t>(d);
    } else if (field == "problem.amplitude") {
      c.amplitude = to_double(field, v);
    } else if (field == "problem.eigenvalues") {
      c.eigenvalues = to_list(field, v);
    } else if (field == "problem.optimum") {
      c.optimum = to_list(field, v);
    } else if (field == "problem.init") {
      const auto xs = to_list(field, v);
      if (xs.size() == 1) {
        c.initial_fill = xs.front();
        c.initial_point.clear();
      } else {
        c.initial_point = xs;
      }
    } else if (field == "noise.p_moment") {
      c.moment_index = to_double(field, v);
    } else if (field == "noise.tail_index") {
      c.tail_index = to_double(field, v);
    } else if (field == "noise.scale") {
      c.noise_scale = to_double(field, v);
    } else if (field == "noise.safety") {
      c.safety = to_double(field, v);
    } else if (field == "noise.calibration_samples") {
      c.calibration_samples = to_int(field, v);
    } else if (field == "norm.q") {
      c.q = to_double(field, v);
    } else if (field == "sweep.T_grid") {
      c.t_grid.clear();
      for (double x : to_list(field, v)) c.t_grid.push_back(to_int(field, fmt::format("{:.17g}", x)));
    } else if (field == "concentration.trials") {
      c.coverage_trials = to_int(field, v);
    } else if (field == "concentration.length") {
      c.stream_length = to_int(field, v);
    } else {
      throw ConfigError(field, "unknown configuration key");
    }
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c;
  apply_settings(c, parse_config_text(ss.str()));
  return c;
}

void validate(const RunConfig& c) {
  if (c.horizon < 1) throw ConfigError("run.T", "horizon must be >= 1");
  if (!(c.b > 0.0)) throw ConfigError("run.b", "must be positive");
  if (!(c.s > 0.0)) throw ConfigError("run.s", "must be positive");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw ConfigError("run.delta", "must lie in (0, 1)");
  if (c.n_seeds < 1) throw ConfigError("run.seeds", "must be >= 1");
  if (c.out_dir.empty()) throw ConfigError("run.out", "must not be empty");
  if (c.dim < 1) throw ConfigError("problem.dim", "must be positive");
  if (c.problem == ProblemKind::cosine_sum && !(c.amplitude > 0.0)) {
    throw ConfigError("problem.amplitude", "must be positive");
  }
  if (!c.eigenvalues.empty() && c.eigenvalues.size() != c.dim) {
    throw ConfigError("problem.eigenvalues", fmt::format("expected {} entries", c.dim));
  }
  for (double l : c.eigenvalues) {
    if (!(l > 0.0)) throw ConfigError("problem.eigenvalues", "entries must be positive");
  }
  if (!c.optimum.empty() && c.optimum.size() != c.dim) {
    throw ConfigError("problem.optimum", fmt::format("expected {} entries", c.dim));
  }
  if (!c.initial_point.empty() && c.initial_point.size() != c.dim) {
    throw ConfigError("problem.init", fmt::format("expected 1 or {} entries", c.dim));
  }
  if (!(c.moment_index > 1.0 && c.moment_index <= 2.0)) {
    throw ConfigError("noise.p_moment", "must lie in (1, 2]");
  }
  if (!(c.tail_index > c.moment_index)) {
    throw ConfigError("noise.tail_index", "must exceed noise.p_moment (finite p-th moment)");
  }
  if (!(c.noise_scale >= 0.0)) throw ConfigError("noise.scale", "must be non-negative");
  if (!(c.safety >= 1.0)) throw ConfigError("noise.safety", "must be >= 1");
  if (c.calibration_samples < 10000) throw ConfigError("noise.calibration_samples", "must be >= 10000");
  if (!(c.q > 1.0 && c.q <= 2.0)) {
    throw ConfigError("norm.q", "primal exponent must lie in (1, 2] so the dual norm is smooth");
  }
  if (c.t_grid.size() < 3) throw ConfigError("sweep.T_grid", "needs at least 3 entries");
  for (std::size_t i = 0; i < c.t_grid.size(); ++i) {
    if (c.t_grid[i] < 1) throw ConfigError("sweep.T_grid", "entries must be >= 1");
    if (i && c.t_grid[i] <= c.t_grid[i - 1]) throw ConfigError("sweep.T_grid", "must be ascending");
  }
  if (c.coverage_trials < 1000) throw ConfigError("concentration.trials", "must be >= 1000");
  if (c.stream_length < 1) throw ConfigError("concentration.length", "must be >= 1");
  // alpha <= 1 at the configured horizon
  const double alpha = c.b / std::pow(static_cast<double>(c.horizon),
                                      momentum_exponent(c.moment_index, c.algorithm));
  if (alpha > 1.0) {
    throw ConfigError("run.b", fmt::format("alpha = {:.6g} > 1 at T = {}; increase run.T or "
                                           "decrease run.b",
                                           alpha, c.horizon));
  }
}

std::string config_echo(const RunConfig& c) {
  std::string out;
  out += "[run]\n";
  out += fmt::format("algo = {}\n", c.algorithm == Order::first ? "nsgd" : "nigt");
  out += fmt::format("T = {}\n", c.horizon);
  out += fmt::format("b = {}\n", c.b);
  out += fmt::format("s = {}\n", c.s);
  out += fmt::format("delta = {}\n", c.delta);
  out += fmt::format("seed = {}\n", c.seed);
  out += fmt::format("seeds = {}\n", c.n_seeds);
  out += fmt::format("warmup = {}\n", to_string(c.warmup));
  out += fmt::format("out = {}\n", c.out_dir);
  out += fmt::format("plots = {}\n", c.plots ? "true" : "false");
  out += "\n[problem]\n";
  out += fmt::format("kind = {}\n", to_string(c.problem));
  out += fmt::format("dim = {}\n", c.dim);
  out += fmt::format("amplitude = {}\n", c.amplitude);
  const ProblemSpec p = make_problem(c);
  if (c.problem == ProblemKind::quadratic) {
    out += fmt::format("eigenvalues = {}\n", join(p.eigenvalues));
    out += fmt::format("optimum = {}\n", join(p.optimum));
  }
  out += fmt::format("init = {}\n", join(p.initial_point));
  out += "\n[noise]\n";
  out += fmt::format("p_moment = {}\n", c.moment_index);
  out += fmt::format("tail_index = {}\n", c.tail_index);
  out += fmt::format("scale = {}\n", c.noise_scale);
  out += "# G is calibrated at the initial point and multiplied by `safety` to absorb\n"
         "# drift of the gradient moment along the trajectory.\n";
  out += fmt::format("safety = {}\n", c.safety);
  out += fmt::format("calibration_samples = {}\n", c.calibration_samples);
  out += "\n[norm]\n";
  out += fmt::format("q = {}\n", c.q);
  out += "\n[sweep]\n";
  std::string grid;
  for (std::size_t i = 0; i < c.t_grid.size(); ++i) grid += (i ? "," : "") + std::to_string(c.t_grid[i]);
  out += fmt::format("T_grid = {}\n", grid);
  out += "\n[concentration]\n";
  out += fmt::format("trials = {}\n", c.coverage_trials);
  out += fmt::format("length = {}\n", c.stream_length);
  return out;
}

NormedSpace make_space(const RunConfig& c) { return NormedSpace(c.dim, c.q); }

ProblemSpec make_problem(const RunConfig& c) {
  const NormedSpace space = make_space(c);
  std::vector<double> init = c.initial_point;
  if (init.empty()) init.assign(c.dim, c.initial_fill);
  if (c.problem == ProblemKind::cosine_sum) return make_cosine_sum(space, c.amplitude, init);
  std::vector<double> eig = c.eigenvalues;
  if (eig.empty()) {
    for (std::size_t i = 0; i < c.dim; ++i) eig.push_back(static_cast<double>(i + 1));
  }
  std::vector<double> opt = c.optimum;
  if (opt.empty()) opt.assign(c.dim, 0.0);
  return make_quadratic(space, eig, opt, init);
}

NoiseModel make_noise(const RunConfig& c) {
  return make_noise_model(c.moment_index, c.tail_index, c.noise_scale);
}

}  // namespace clipnorm
