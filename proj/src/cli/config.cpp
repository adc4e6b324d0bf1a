#include "hjb/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace hjb::cli {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Range {
  double lo = -kInf;
  double hi = kInf;
  bool lo_open = false;
  bool hi_open = false;

  bool contains(double x) const {
    if (!std::isfinite(x)) return false;
    if (lo_open ? !(x > lo) : !(x >= lo)) return false;
    if (hi_open ? !(x < hi) : !(x <= hi)) return false;
    return true;
  }

  std::string describe() const {
    std::ostringstream os;
    os << (lo_open ? "(" : "[") << lo << ", " << hi << (hi_open ? ")" : "]");
    return os.str();
  }
};

Range finite() { return {}; }
Range positive() { return {0.0, kInf, true, false}; }
Range non_negative() { return {0.0, kInf, false, false}; }
Range closed(double lo, double hi) { return {lo, hi, false, false}; }
Range half_open(double lo, double hi) { return {lo, hi, false, true}; }
Range open_closed(double lo, double hi) { return {lo, hi, true, false}; }

// Reads keys from one JSON object and remembers which ones were consumed, so
// that leftovers can be reported as unknown.
class ParamReader {
public:
  ParamReader(const json& obj, std::string scope) : obj_(obj), scope_(std::move(scope)) {
    if (!obj_.is_object()) throw ConfigError(scope_ + ": expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  double real(const std::string& key, double fallback, const Range& range) {
    seen_.insert(key);
    if (!obj_.contains(key)) return fallback;
    return to_real(obj_.at(key), path(key), range);
  }

  int integer(const std::string& key, int fallback, int lo, int hi) {
    seen_.insert(key);
    if (!obj_.contains(key)) return fallback;
    return to_integer(obj_.at(key), path(key), lo, hi);
  }

  bool flag(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!obj_.contains(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) throw ConfigError(path(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string choice(const std::string& key, const std::string& fallback,
                     std::initializer_list<const char*> allowed) {
    seen_.insert(key);
    if (!obj_.contains(key)) return fallback;
    const json& v = obj_.at(key);
    std::string options;
    for (const char* a : allowed) {
      if (v.is_string() && v.get<std::string>() == a) return a;
      options += options.empty() ? a : std::string(", ") + a;
    }
    throw ConfigError(path(key) + ": expected one of " + options);
  }

  // A bare number is accepted as a one-element list.
  std::vector<double> reals(const std::string& key, std::vector<double> fallback,
                            const Range& range, std::size_t min_len, std::size_t max_len) {
    seen_.insert(key);
    if (!obj_.contains(key)) return fallback;
    const json& v = obj_.at(key);
    std::vector<double> out;
    if (v.is_number()) {
      out.push_back(to_real(v, path(key), range));
    } else if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(to_real(v[i], path(key) + "[" + std::to_string(i) + "]", range));
      }
    } else {
      throw ConfigError(path(key) + ": expected a number or a list of numbers");
    }
    if (out.size() < min_len || out.size() > max_len) {
      throw ConfigError(path(key) + ": expected between " + std::to_string(min_len) + " and " +
                        std::to_string(max_len) + " entries");
    }
    return out;
  }

  std::vector<std::vector<double>> matrix(const std::string& key,
                                          std::vector<std::vector<double>> fallback) {
    seen_.insert(key);
    if (!obj_.contains(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_array()) throw ConfigError(path(key) + ": expected a list of rows");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string row_path = path(key) + "[" + std::to_string(i) + "]";
      if (!v[i].is_array()) throw ConfigError(row_path + ": expected a list of numbers");
      std::vector<double> row;
      for (std::size_t l = 0; l < v[i].size(); ++l) {
        row.push_back(to_real(v[i][l], row_path + "[" + std::to_string(l) + "]", finite()));
      }
      out.push_back(std::move(row));
    }
    return out;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(path(it.key()) + ": unknown key");
    }
  }

  std::string path(const std::string& key) const { return scope_ + "." + key; }

private:
  static double to_real(const json& v, const std::string& where, const Range& range) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    const double x = v.get<double>();
    if (!range.contains(x)) {
      throw ConfigError(where + ": value out of range " + range.describe());
    }
    return x;
  }

  static int to_integer(const json& v, const std::string& where, int lo, int hi) {
    if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi) {
      throw ConfigError(where + ": value out of range [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
    }
    return static_cast<int>(x);
  }

  const json& obj_;
  std::string scope_;
  std::set<std::string> seen_;
};

constexpr int kMaxThreads = 1024;
constexpr int kMaxPaths = 10'000'000;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

bool whole_steps(double T, double dt) {
  const double steps = T / dt;
  return std::abs(steps - std::round(steps)) <= 1e-9 * std::max(1.0, steps);
}

} // namespace

bool is_command(const std::string& name) {
  for (const char* c : kCommands) {
    if (name == c) return true;
  }
  return false;
}

SourceSpec Grid2dParams::source() const {
  if (anisotropic) return aniso;
  return quadratic;
}

ExactParams parse_exact(const json& j) {
  ParamReader r(j, "parameters");
  ExactParams p;
  p.a = r.real("a", p.a, positive());
  p.b = r.real("b", p.b, finite());
  p.N = r.integer("N", p.N, 1, 64);
  p.samples = r.integer("samples", p.samples, 2, 1'000'000);
  p.r_max = r.real("r_max", p.r_max, positive());
  r.finish();
  return p;
}

RadialParams parse_radial(const json& j) {
  ParamReader r(j, "parameters");
  RadialParams p;
  p.N = r.integer("N", p.N, 1, 64);
  p.a = r.real("a", p.a, positive());
  p.b = r.real("b", p.b, finite());
  p.p = r.real("p", p.p, open_closed(1.0, 16.0));
  p.R = r.real("R", p.R, positive());
  p.m = r.integer("m", p.m, 16, 1'000'000);
  const std::string bc =
      r.choice("bc", "neumann_exact", {"neumann_exact", "dirichlet_exact", "neumann", "dirichlet"});
  p.bc = bc == "neumann_exact"     ? BcKind::NeumannExact
         : bc == "dirichlet_exact" ? BcKind::DirichletExact
         : bc == "neumann"         ? BcKind::Neumann
                                   : BcKind::Dirichlet;
  const bool needs_value = p.bc == BcKind::Neumann || p.bc == BcKind::Dirichlet;
  require(!r.has("bc_value") || needs_value,
          "parameters.bc_value: only used with bc = neumann or dirichlet");
  require(r.has("bc_value") || !needs_value,
          "parameters.bc_value: required with bc = neumann or dirichlet");
  p.bc_value = r.real("bc_value", p.bc_value, finite());
  require(p.p == 2.0 || (p.bc != BcKind::NeumannExact && p.bc != BcKind::DirichletExact),
          "parameters.bc: closed-form boundary data need p = 2");
  p.newton_tol = r.real("newton_tol", p.newton_tol, positive());
  p.max_newton_iters = r.integer("max_newton_iters", p.max_newton_iters, 1, 100'000);
  r.finish();
  return p;
}

Grid2dParams parse_grid2d(const json& j) {
  ParamReader r(j, "parameters");
  Grid2dParams p;
  p.anisotropic = r.choice("source", "quadratic", {"quadratic", "anisotropic"}) == "anisotropic";
  if (p.anisotropic) {
    p.L = 3.0;
    p.n = 70;
    p.lambda = 25.0;
    require(!r.has("a") && !r.has("b"), "parameters: a and b belong to the quadratic source");
    p.aniso.cxx = r.real("cxx", p.aniso.cxx, finite());
    p.aniso.cyy = r.real("cyy", p.aniso.cyy, finite());
    p.aniso.cxy = r.real("cxy", p.aniso.cxy, finite());
    p.aniso.c0 = r.real("c0", p.aniso.c0, finite());
  } else {
    for (const char* k : {"cxx", "cyy", "cxy", "c0"}) {
      require(!r.has(k), std::string("parameters.") + k + ": belongs to the anisotropic source");
    }
    p.quadratic.a = r.real("a", p.quadratic.a, positive());
    p.quadratic.b = r.real("b", p.quadratic.b, finite());
  }
  p.p = r.real("p", p.p, open_closed(1.0, 16.0));
  p.L = r.real("L", p.L, positive());
  p.n = r.integer("n", p.n, 8, 4000);
  p.lambda = r.real("lambda", p.lambda, positive());
  p.damping = r.real("damping", p.damping, half_open(0.0, 1.0));
  p.tol = r.real("tol", p.tol, positive());
  p.max_iters = r.integer("max_iters", p.max_iters, 1, 10'000'000);
  p.gradient_clip = r.real("gradient_clip", p.gradient_clip, non_negative());
  const std::string init = r.choice("init", "source", {"source", "exact", "zero"});
  p.init = init == "source" ? InitKind::Source : init == "exact" ? InitKind::Exact : InitKind::Zero;
  require(p.init != InitKind::Exact || p.has_closed_form(),
          "parameters.init: exact start needs the quadratic source with p = 2");
  p.bins = r.integer("bins", p.bins, 4, 10'000);
  r.finish();
  return p;
}

MonotoneParams parse_monotone(const json& j) {
  ParamReader r(j, "parameters");
  MonotoneParams p;
  p.a = r.real("a", p.a, positive());
  p.b = r.real("b", p.b, finite());
  p.N = r.integer("N", p.N, 1, 64);
  p.R_obs = r.real("R_obs", p.R_obs, positive());
  p.radii = r.reals("radii", p.radii, positive(), 2, 1000);
  require(strictly_increasing(p.radii), "parameters.radii: must be strictly increasing");
  require(p.radii.front() > p.R_obs, "parameters.radii: every radius must exceed R_obs");
  p.eps = r.reals("eps", {}, open_closed(0.0, 1.0), 0, 1000);
  require(p.eps.empty() || p.eps.size() == p.radii.size(),
          "parameters.eps: one entry per radius");
  p.nodes_per_unit = r.integer("nodes_per_unit", p.nodes_per_unit, 4, 100'000);
  p.newton_tol = r.real("newton_tol", p.newton_tol, positive());
  p.parallel = r.flag("parallel", p.parallel);
  r.finish();
  return p;
}

SimulateParams parse_simulate(const json& j) {
  ParamReader r(j, "parameters");
  SimulateParams p;
  p.a = r.real("a", p.a, positive());
  p.b = r.real("b", p.b, finite());
  p.sigma = r.real("sigma", p.sigma, non_negative());
  p.N = r.integer("N", p.N, 1, 64);
  p.x0 = r.reals("x0", p.x0, finite(), 1, 64);
  require(p.x0.size() == 1 || p.x0.size() == static_cast<std::size_t>(p.N),
          "parameters.x0: one value or N values");
  if (p.x0.size() == 1) p.x0.assign(static_cast<std::size_t>(p.N), p.x0.front());
  p.T = r.real("T", p.T, positive());
  p.dt = r.real("dt", p.dt, positive());
  require(whole_steps(p.T, p.dt), "parameters.T: must be a whole number of dt steps");
  p.paths = r.integer("paths", p.paths, 2, kMaxPaths);
  p.record_stride = r.integer("record_stride", p.record_stride, 1, 1'000'000);
  p.burn_in = r.real("burn_in", p.burn_in, half_open(0.0, 1.0));
  p.checkpoints = r.reals("checkpoints", p.checkpoints, non_negative(), 0, 1000);
  for (double t : p.checkpoints) {
    require(t <= p.T, "parameters.checkpoints: every checkpoint must lie in [0, T]");
  }
  require(strictly_increasing(p.checkpoints), "parameters.checkpoints: must be increasing");
  p.output_paths = r.integer("output_paths", p.output_paths, 0, p.paths);
  p.threads = r.integer("threads", p.threads, 0, kMaxThreads);
  r.finish();
  return p;
}

VerifyParams parse_verify(const json& j) {
  ParamReader r(j, "parameters");
  VerifyParams p;
  p.a = r.real("a", p.a, positive());
  p.b = r.real("b", p.b, finite());
  p.sigma = r.real("sigma", p.sigma, non_negative());
  p.N = r.integer("N", p.N, 1, 64);
  p.x0 = r.reals("x0", p.x0, finite(), 1, 100);
  p.T = r.real("T", p.T, positive());
  p.dt = r.real("dt", p.dt, positive());
  require(whole_steps(p.T, p.dt), "parameters.T: must be a whole number of dt steps");
  p.paths = r.integer("paths", p.paths, 2, kMaxPaths);
  p.gain_factors = r.reals("gain_factors", p.gain_factors, non_negative(), 0, 100);
  p.truncation_budget = r.real("truncation_budget", p.truncation_budget, positive());
  p.threads = r.integer("threads", p.threads, 0, kMaxThreads);
  r.finish();
  return p;
}

RegimeParams parse_regime(const json& j) {
  ParamReader r(j, "parameters");
  RegimeParams p;
  RegimeModel& m = p.model;
  m.delta = r.reals("delta", m.delta, positive(), 2, 64);
  m.alpha = r.matrix("alpha", m.alpha);
  m.sigma = r.reals("sigma", m.sigma, positive(), 2, 64);
  m.a = r.reals("a", m.a, positive(), 2, 64);
  m.b = r.reals("b", m.b, non_negative(), 2, 64);
  m.p = r.reals("p", m.p, closed(2.0, 2.0), 2, 64);
  m.N = r.integer("N", m.N, 1, 64);
  const auto violations = validate_regime_model(m);
  if (!violations.empty()) {
    std::string msg = "parameters: invalid regime model:";
    for (const auto& v : violations) msg += " " + v.field + " (" + v.predicate + ");";
    throw ConfigError(msg);
  }
  p.x0 = r.reals("x0", p.x0, finite(), 1, 64);
  require(p.x0.size() == 1 || p.x0.size() == static_cast<std::size_t>(m.N),
          "parameters.x0: one value or N values");
  if (p.x0.size() == 1) p.x0.assign(static_cast<std::size_t>(m.N), p.x0.front());
  p.j0 = r.integer("j0", p.j0, 1, static_cast<int>(m.regimes()));
  p.T = r.real("T", p.T, positive());
  p.dt = r.real("dt", p.dt, positive());
  require(whole_steps(p.T, p.dt), "parameters.T: must be a whole number of dt steps");
  p.paths = r.integer("paths", p.paths, 2, kMaxPaths);
  p.record_stride = r.integer("record_stride", p.record_stride, 1, 1'000'000);
  p.switching = r.choice("switching", "bernoulli", {"bernoulli", "clock"}) == "bernoulli"
                    ? stochastic::Switching::BernoulliEuler
                    : stochastic::Switching::ExponentialClock;
  p.burn_in = r.real("burn_in", p.burn_in, half_open(0.0, 1.0));
  p.output_paths = r.integer("output_paths", p.output_paths, 0, p.paths);
  p.switch_dt = r.real("switch_dt", p.switch_dt, positive());
  p.switch_T = r.real("switch_T", p.switch_T, positive());
  require(whole_steps(p.switch_T, p.switch_dt),
          "parameters.switch_T: must be a whole number of switch_dt steps");
  p.switch_paths = r.integer("switch_paths", p.switch_paths, 2, kMaxPaths);
  p.multistart_seeds = r.integer("multistart_seeds", p.multistart_seeds, 0, 100'000);
  p.threads = r.integer("threads", p.threads, 0, kMaxThreads);
  r.finish();
  return p;
}

void validate_parameters(const std::string& command, const json& parameters) {
  if (command == "exact") parse_exact(parameters);
  else if (command == "radial") parse_radial(parameters);
  else if (command == "grid2d") parse_grid2d(parameters);
  else if (command == "monotone") parse_monotone(parameters);
  else if (command == "simulate") parse_simulate(parameters);
  else if (command == "verify") parse_verify(parameters);
  else if (command == "regime") parse_regime(parameters);
  else if (command == "all") ParamReader(parameters, "parameters").finish();
  else throw ConfigError("unknown command '" + command + "'");
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& k = it.key();
    if (k != "command" && k != "seed" && k != "output_dir" && k != "parameters") {
      throw ConfigError("config." + k + ": unknown key");
    }
  }
  RunConfig cfg;
  if (doc.contains("command")) {
    const json& c = doc.at("command");
    if (!c.is_string() || !is_command(c.get<std::string>())) {
      throw ConfigError("config.command: expected one of exact, radial, grid2d, monotone, "
                        "simulate, regime, verify, all");
    }
    cfg.command = c.get<std::string>();
  }
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ConfigError("config.seed: expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("output_dir")) {
    const json& o = doc.at("output_dir");
    if (!o.is_string() || o.get<std::string>().empty()) {
      throw ConfigError("config.output_dir: expected a non-empty string");
    }
    cfg.output_dir = o.get<std::string>();
  }
  if (doc.contains("parameters")) cfg.parameters = doc.at("parameters");
  if (!cfg.command.empty()) validate_parameters(cfg.command, cfg.parameters);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/false);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

} // namespace hjb::cli
