#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fbmlab/error.hpp"
#include "fbmlab/experiment.hpp"
#include "fbmlab/models.hpp"
#include "fbmlab/noise.hpp"

namespace fbmlab {

namespace {

constexpr std::array<std::pair<Task, std::string_view>, 6> kTasks{{{Task::generate_noise, "generate-noise"},
                                                                    {Task::solve, "solve"},
                                                                    {Task::equivalence, "equivalence"},
                                                                    {Task::pullback, "pullback"},
                                                                    {Task::attractor, "attractor"},
                                                                    {Task::check_assumptions, "check-assumptions"}}};

// Typed reads from one JSON object; finish() rejects keys never read.
class Block {
 public:
  Block(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(path_ + "." + key + " has the wrong type");
    }
  }

  template <typename T>
  T require(const std::string& key) {
    if (!has(key)) throw ConfigError(path_ + "." + key + " is required");
    return get<T>(key, T{});
  }

  const nlohmann::json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key " + path_ + "." + key);
    }
  }

  const std::string& path() const { return path_; }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void positive(double v, const std::string& key) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key + " must be positive");
}

bool needs_noise(Task t) { return t != Task::check_assumptions; }
bool needs_model(Task t) { return t != Task::generate_noise; }

}  // namespace

std::string_view task_name(Task task) {
  for (const auto& [t, name] : kTasks) {
    if (t == task) return name;
  }
  return "unknown";
}

Task parse_task(std::string_view name) {
  for (const auto& [t, n] : kTasks) {
    if (n == name) return t;
  }
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json initial = {{"seed", solver.initial.seed}, {"scale", solver.initial.scale}};
  if (solver.initial.values) initial["values"] = *solver.initial.values;
  nlohmann::json j{
      {"task", task_name(task)},
      {"noise",
       {{"hurst", noise.hurst},
        {"step", noise.step},
        {"past", noise.past},
        {"future", noise.future},
        {"seeds", noise.seeds},
        {"residual_steps", noise.residual_steps}}},
      {"solver",
       {{"scheme", scheme_name(solver.scheme)},
        {"dt", solver.dt},
        {"beta", solver.beta},
        {"t0", solver.t0},
        {"t1", solver.t1},
        {"newton_tol", solver.newton_tol},
        {"newton_max_iter", solver.newton_max_iter},
        {"record_every", solver.record_every},
        {"coefficients", solver.coefficients},
        {"refinements", solver.refinements},
        {"initial", initial}}},
      {"attractor",
       {{"fiber_time", attractor.fiber_time},
        {"pullback_times", attractor.pullback_times},
        {"initial_points", attractor.initial_points},
        {"initial_seed", attractor.initial_seed},
        {"initial_scale", attractor.initial_scale},
        {"tolerance", attractor.tolerance},
        {"invariance_time", attractor.invariance_time}}},
      {"checks",
       {{"samples", checks.samples},
        {"pilot", checks.pilot},
        {"seed", checks.seed},
        {"scale", checks.scale},
        {"spread", checks.spread},
        {"time", checks.time}}},
      {"output", output.string()},
      {"plots", plots}};
  if (model) j["model"] = *model;
  return j;
}

ExperimentConfig parse_config(const nlohmann::json& doc) {
  Block top(doc, "config");
  ExperimentConfig cfg;
  cfg.task = parse_task(top.require<std::string>("task"));
  cfg.output = top.get<std::string>("output", "out");
  cfg.plots = top.get<bool>("plots", false);

  if (top.has("noise")) {
    Block b(top.raw("noise"), "noise");
    cfg.noise.hurst = HurstIndex(b.get<double>("hurst", cfg.noise.hurst)).value();
    cfg.noise.step = b.get<double>("step", cfg.noise.step);
    positive(cfg.noise.step, "noise.step");
    cfg.noise.past = b.get<double>("past", cfg.noise.past);
    cfg.noise.future = b.get<double>("future", cfg.noise.future);
    if (cfg.noise.past < 0.0 || cfg.noise.future < 0.0) throw ConfigError("noise.past and noise.future must be >= 0");
    try {
      aligned_index(cfg.noise.past, cfg.noise.step);
      aligned_index(cfg.noise.future, cfg.noise.step);
    } catch (const RangeError&) {
      throw ConfigError("noise.past and noise.future must be multiples of noise.step");
    }
    if (cfg.noise.past + cfg.noise.future <= 0.0) throw ConfigError("noise window is empty");
    cfg.noise.seeds = b.get<std::vector<std::uint64_t>>("seeds", {});
    cfg.noise.residual_steps = b.get<std::vector<double>>("residual_steps", {});
    for (double s : cfg.noise.residual_steps) {
      positive(s, "noise.residual_steps");
      const double r = s / cfg.noise.step;
      if (std::abs(r - std::nearbyint(r)) > 1e-9 * r || r < 1.0) {
        throw ConfigError("noise.residual_steps must be multiples of noise.step");
      }
    }
    b.finish();
  }
  if (needs_noise(cfg.task) && cfg.noise.seeds.empty()) throw ConfigError("noise.seeds must list at least one seed");

  if (top.has("model")) {
    cfg.model = top.raw("model");
    make_model(*cfg.model);
  }
  if (needs_model(cfg.task) && !cfg.model) throw ConfigError("model block is required for task " + std::string(task_name(cfg.task)));

  if (top.has("solver")) {
    Block b(top.raw("solver"), "solver");
    auto& s = cfg.solver;
    s.scheme = parse_scheme(b.get<std::string>("scheme", std::string(scheme_name(s.scheme))));
    s.dt = b.get<double>("dt", s.dt);
    s.beta = b.get<double>("beta", s.beta);
    s.t0 = b.get<double>("t0", s.t0);
    s.t1 = b.get<double>("t1", s.t1);
    s.newton_tol = b.get<double>("newton_tol", s.newton_tol);
    s.newton_max_iter = b.get<int>("newton_max_iter", s.newton_max_iter);
    s.record_every = b.get<std::size_t>("record_every", s.record_every);
    s.coefficients = b.get<bool>("coefficients", s.coefficients);
    s.refinements = b.get<std::size_t>("refinements", s.refinements);
    if (b.has("initial")) {
      Block ib(b.raw("initial"), "solver.initial");
      if (ib.has("values")) s.initial.values = ib.get<std::vector<double>>("values", {});
      s.initial.seed = ib.get<std::uint64_t>("seed", s.initial.seed);
      s.initial.scale = ib.get<double>("scale", s.initial.scale);
      ib.finish();
    }
    b.finish();
    if (!std::isfinite(s.beta)) throw ConfigError("solver.beta must be finite");
    if (!(s.t1 >= s.t0)) throw ConfigError("solver.t1 must not precede solver.t0");
    if (s.refinements < 1) throw ConfigError("solver.refinements must be positive");
    SolveConfig sc;
    sc.dt = s.dt;
    sc.newton_tol = s.newton_tol;
    sc.newton_max_iter = s.newton_max_iter;
    sc.validate(cfg.noise.step);
  }
  if (cfg.task == Task::solve || cfg.task == Task::equivalence) {
    if (cfg.solver.t0 < -cfg.noise.past || cfg.solver.t1 > cfg.noise.future) {
      throw ConfigError("solver window [t0, t1] must lie inside the noise window");
    }
  }

  if (top.has("attractor")) {
    Block b(top.raw("attractor"), "attractor");
    auto& a = cfg.attractor;
    a.fiber_time = b.get<double>("fiber_time", a.fiber_time);
    a.pullback_times = b.get<std::vector<double>>("pullback_times", a.pullback_times);
    a.initial_points = b.get<std::size_t>("initial_points", a.initial_points);
    a.initial_seed = b.get<std::uint64_t>("initial_seed", a.initial_seed);
    a.initial_scale = b.get<double>("initial_scale", a.initial_scale);
    a.tolerance = b.get<double>("tolerance", a.tolerance);
    a.invariance_time = b.get<double>("invariance_time", a.invariance_time);
    b.finish();
    if (a.initial_points == 0) throw ConfigError("attractor.initial_points must be positive");
    positive(a.tolerance, "attractor.tolerance");
  }
  if (cfg.task == Task::pullback || cfg.task == Task::attractor) {
    const auto& a = cfg.attractor;
    if (a.pullback_times.size() < 2) throw ConfigError("attractor.pullback_times needs at least two depths");
    if (!std::is_sorted(a.pullback_times.begin(), a.pullback_times.end()) || a.pullback_times.front() < 0.0) {
      throw ConfigError("attractor.pullback_times must be nonnegative and increasing");
    }
    if (a.fiber_time - a.pullback_times.back() < -cfg.noise.past ||
        a.fiber_time + std::max(0.0, a.invariance_time) > cfg.noise.future) {
      throw ConfigError("pullback window must lie inside the noise window");
    }
    if (a.invariance_time < 0.0) throw ConfigError("attractor.invariance_time must be >= 0");
  }

  if (top.has("checks")) {
    Block b(top.raw("checks"), "checks");
    auto& c = cfg.checks;
    c.samples = b.get<std::size_t>("samples", c.samples);
    c.pilot = b.get<std::size_t>("pilot", c.pilot);
    c.seed = b.get<std::uint64_t>("seed", c.seed);
    c.scale = b.get<double>("scale", c.scale);
    c.spread = b.get<double>("spread", c.spread);
    c.time = b.get<double>("time", c.time);
    b.finish();
    if (c.samples < 2 || c.pilot < 1) throw ConfigError("checks.samples must be >= 2 and checks.pilot >= 1");
    if (c.spread < 0.0) throw ConfigError("checks.spread must be >= 0");
  }
  top.finish();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(file.string() + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON parse error");
  }
  return parse_config(doc);
}

}  // namespace fbmlab
