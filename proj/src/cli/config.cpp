#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "fdsm/cli.hpp"

namespace fdsm::cli {

namespace {

std::string trim(std::string_view s) {
  std::size_t lo = 0, hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return std::string(s.substr(lo, hi - lo));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& s, std::size_t line, const std::string& key) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError(line, key + ": expected a real number, got '" + s + "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& s, std::size_t line, const std::string& key) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(line, key + ": expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

bool parse_bool(const std::string& s, std::size_t line, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(line, key + ": expected true or false, got '" + s + "'");
}

Vector parse_vector(const std::string& s, std::size_t line, const std::string& key) {
  Vector v;
  for (const auto& part : split(s, ',')) v.push_back(parse_double(part, line, key));
  if (v.empty()) throw ConfigError(line, key + ": empty vector");
  return v;
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& s, std::size_t line, const std::string& key, Parse parse) {
  std::vector<T> out;
  for (const auto& part : split(s, ',')) out.push_back(parse(part, line, key));
  if (out.empty()) throw ConfigError(line, key + ": empty list");
  return out;
}

TransformKind parse_transform_at(const std::string& s, std::size_t line, const std::string& key) {
  try {
    return parse_transform(s);
  } catch (const InputError& e) {
    throw ConfigError(line, key + ": " + e.what());
  }
}

void check_a(double a, std::size_t line) {
  if (!(a > 0.0 && a < 1.0)) throw ConfigError(line, "a must lie in (0,1)");
}

void check_a0(double a0, std::size_t line) {
  if (!(a0 > 0.0)) throw ConfigError(line, "a0 must be positive");
}

WorkerConfig parse_worker(const std::string& s, std::size_t line) {
  WorkerConfig w;
  bool has_normal = false, has_center = false;
  for (const auto& field : split(s, ';')) {
    if (field.empty()) continue;
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "worker: expected name=value, got '" + field + "'");
    const std::string name = trim(field.substr(0, eq));
    const std::string value = trim(field.substr(eq + 1));
    if (name == "tau") {
      w.tau = parse_uint(value, line, "worker.tau");
    } else if (name == "normal") {
      w.normal = parse_vector(value, line, "worker.normal");
      has_normal = true;
    } else if (name == "offset") {
      w.offset = parse_double(value, line, "worker.offset");
    } else if (name == "center") {
      w.center = parse_vector(value, line, "worker.center");
      has_center = true;
    } else {
      throw ConfigError(line, "worker: unknown field '" + name + "'");
    }
  }
  if (!has_normal || !has_center) throw ConfigError(line, "worker: normal and center are required");
  if (w.normal.size() != w.center.size()) throw ConfigError(line, "worker: normal and center differ in length");
  if (norm_sq(w.normal) == 0.0) throw ConfigError(line, "worker: normal must be non-zero");
  return w;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (value.empty()) throw ConfigError(line, key + ": missing value");

    if (key == "problem") {
      if (value != "gradient" && value != "checker" && value != "image") {
        throw ConfigError(line, "problem must be gradient, checker or image");
      }
      c.problem = value;
    } else if (key == "image") {
      c.image = value;
    } else if (key == "size") {
      c.size = parse_uint(value, line, key);
      if (c.size < 2) throw ConfigError(line, "size must be at least 2");
    } else if (key == "channels") {
      c.channels = parse_uint(value, line, key);
      if (c.channels != 1 && c.channels != 3) throw ConfigError(line, "channels must be 1 or 3");
    } else if (key == "ratio") {
      c.ratio = parse_double(value, line, key);
      if (c.ratio < 0.0 || c.ratio > 1.0) throw ConfigError(line, "ratio must lie in [0,1]");
    } else if (key == "transform") {
      c.transform = parse_transform_at(value, line, key);
    } else if (key == "tau") {
      c.tau = parse_uint(value, line, key);
    } else if (key == "delay") {
      if (value == "cyclic") c.delay = DelayKind::kCyclic;
      else if (value == "fixed") c.delay = DelayKind::kFixed;
      else if (value == "zero") c.delay = DelayKind::kZero;
      else throw ConfigError(line, "delay must be cyclic, fixed or zero");
    } else if (key == "a") {
      c.a = parse_double(value, line, key);
      check_a(c.a, line);
    } else if (key == "a0") {
      c.a0 = parse_double(value, line, key);
      check_a0(c.a0, line);
    } else if (key == "alpha") {
      c.alpha = parse_double(value, line, key);
      if (!(*c.alpha > 0.0)) throw ConfigError(line, "alpha must be positive");
    } else if (key == "eps0") {
      c.eps0 = parse_double(value, line, key);
      if (c.eps0 < 0.0) throw ConfigError(line, "eps0 must be non-negative");
    } else if (key == "oracle") {
      if (value == "exact") c.oracle = OracleKind::kExact;
      else if (value == "shrink") c.oracle = OracleKind::kShrink;
      else if (value == "offset") c.oracle = OracleKind::kOffset;
      else throw ConfigError(line, "oracle must be exact, shrink or offset");
    } else if (key == "worker") {
      c.workers.push_back(parse_worker(value, line));
    } else if (key == "mu") {
      c.mu = parse_double(value, line, key);
      if (!(c.mu > 0.0)) throw ConfigError(line, "mu must be positive");
    } else if (key == "bound") {
      if (value == "rate") c.bound = BoundKind::kRate;
      else if (value == "log") c.bound = BoundKind::kLog;
      else if (value == "distributed") c.bound = BoundKind::kDistributed;
      else throw ConfigError(line, "bound must be rate, log or distributed");
    } else if (key == "C") {
      c.bound_c = parse_double(value, line, key);
      if (c.bound_c < 0.0) throw ConfigError(line, "C must be non-negative");
    } else if (key == "L") {
      c.bound_l = parse_double(value, line, key);
      if (c.bound_l < 0.0) throw ConfigError(line, "L must be non-negative");
    } else if (key == "dist0_sq") {
      c.dist0_sq = parse_double(value, line, key);
      if (c.dist0_sq < 0.0) throw ConfigError(line, "dist0_sq must be non-negative");
    } else if (key == "m") {
      c.m = parse_uint(value, line, key);
      if (c.m < 1) throw ConfigError(line, "m must be positive");
    } else if (key == "max_iters") {
      c.max_iters = parse_uint(value, line, key);
    } else if (key == "max_seconds") {
      c.max_seconds = parse_double(value, line, key);
      if (!(c.max_seconds > 0.0)) throw ConfigError(line, "max_seconds must be positive");
    } else if (key == "seed") {
      c.seed = parse_uint(value, line, key);
    } else if (key == "out") {
      c.out = value;
    } else if (key == "jobs") {
      c.jobs = parse_uint(value, line, key);
      if (c.jobs < 1) throw ConfigError(line, "jobs must be positive");
    } else if (key == "trace") {
      c.trace = parse_bool(value, line, key);
    } else if (key == "grid_a") {
      c.grid.a = parse_list<double>(value, line, key, parse_double);
      for (double a : c.grid.a) check_a(a, line);
    } else if (key == "grid_a0") {
      c.grid.a0 = parse_list<double>(value, line, key, parse_double);
      for (double a0 : c.grid.a0) check_a0(a0, line);
    } else if (key == "grid_tau") {
      c.grid.tau = parse_list<std::size_t>(value, line, key, parse_uint);
    } else if (key == "grid_transform") {
      c.grid.transform = parse_list<TransformKind>(value, line, key, parse_transform_at);
    } else {
      throw ConfigError(line, "unknown key '" + key + "'");
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const ExperimentConfig& c) {
  if (c.problem == "image" && c.image.empty()) throw ConfigError(0, "problem = image needs an image path");
  if (!(c.a > 0.0 && c.a < 1.0)) throw ConfigError(0, "a must lie in (0,1)");
  if (!(c.a0 > 0.0)) throw ConfigError(0, "a0 must be positive");
  if (c.jobs < 1) throw ConfigError(0, "jobs must be positive");
  if (!c.workers.empty()) {
    const std::size_t d = c.workers.front().normal.size();
    for (const auto& w : c.workers) {
      if (w.normal.size() != d) throw ConfigError(0, "workers must share one dimension");
    }
  }
}

SweepGrid effective_grid(const ExperimentConfig& c) {
  SweepGrid g = c.grid;
  if (g.a.empty()) g.a = {c.a};
  if (g.a0.empty()) g.a0 = {c.a0};
  if (g.tau.empty()) g.tau = {c.tau};
  if (g.transform.empty()) g.transform = {c.transform};
  return g;
}

StepSchedule make_steps(const ExperimentConfig& c, std::size_t tau, double a, double a0,
                        double coefficient) {
  if (c.alpha) return StepSchedule::inverse(*c.alpha);
  return StepSchedule::harmonic(a0, a, tau, coefficient);
}

DelaySchedule make_delays(DelayKind kind, std::size_t tau) {
  switch (kind) {
    case DelayKind::kCyclic: return DelaySchedule::cyclic(tau);
    case DelayKind::kFixed: return DelaySchedule::fixed(tau);
    case DelayKind::kZero: return DelaySchedule::zero();
  }
  return DelaySchedule::zero();
}

ImageGrid load_original(const ExperimentConfig& c) {
  if (c.problem == "image") return read_image(c.image);
  if (c.problem == "checker") return checker_image(c.size, c.size, std::max<std::size_t>(1, c.size / 4), c.channels);
  return gradient_image(c.size, c.size, c.channels);
}

std::vector<WorkerSpec> make_workers(const ExperimentConfig& c) {
  std::vector<WorkerConfig> configs = c.workers;
  if (configs.empty()) {
    configs = {
        WorkerConfig{1, {1.0, 1.0}, 2.0, {3.0, 3.0}},
        WorkerConfig{2, {1.0, -1.0}, 0.5, {2.0, 0.0}},
    };
  }
  std::vector<WorkerSpec> workers;
  for (const auto& w : configs) {
    const Vector origin(w.center.size(), 0.0);
    workers.push_back(WorkerSpec{halfspace_projection(w.normal, w.offset),
                                 add_quadratic(l1_distance(w.center), c.mu, origin),
                                 make_delays(c.delay, w.tau)});
  }
  return workers;
}

}  // namespace fdsm::cli
