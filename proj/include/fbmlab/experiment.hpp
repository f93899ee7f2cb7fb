#pragma once

// Experiment files: a JSON configuration naming a task, a noise block with
// explicit seeds, a model block and task-specific blocks. Runs write their
// results atomically and finish with a manifest.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbmlab/solver.hpp"

namespace fbmlab {

enum class Task { generate_noise, solve, equivalence, pullback, attractor, check_assumptions };

std::string_view task_name(Task task);
Task parse_task(std::string_view name);

struct NoiseBlock {
  double hurst = 0.75;
  double step = 0x1p-8;
  double past = 0.0;    // length of the sampled past
  double future = 1.0;  // length of the sampled future
  std::vector<std::uint64_t> seeds;
  /// Refinement levels for the exponential-transform residual study.
  std::vector<double> residual_steps;
};

struct InitialBlock {
  std::optional<std::vector<double>> values;
  std::uint64_t seed = 0;
  double scale = 1.0;
};

struct SolverBlock {
  Scheme scheme = Scheme::transform_imex;
  double dt = 0x1p-8;
  double beta = 0.0;
  double t0 = 0.0;
  double t1 = 1.0;
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  std::size_t record_every = 1;
  bool coefficients = false;
  InitialBlock initial;
  std::size_t refinements = 3;  // equivalence task: dt, dt/2, ...
};

struct AttractorBlock {
  double fiber_time = 0.0;
  std::vector<double> pullback_times{2.0, 4.0, 8.0, 16.0};
  std::size_t initial_points = 10;
  std::uint64_t initial_seed = 0;
  double initial_scale = 1.0;
  double tolerance = 1e-3;
  double invariance_time = 0.0;  // 0 disables the invariance gap
};

struct ChecksBlock {
  std::size_t samples = 1000;
  std::size_t pilot = 10000;
  std::uint64_t seed = 0;
  double scale = 1.0;
  double spread = 1.0;  // log10 spread of sample scales
  double time = 0.0;
};

struct ExperimentConfig {
  Task task = Task::generate_noise;
  NoiseBlock noise;
  std::optional<nlohmann::json> model;
  SolverBlock solver;
  AttractorBlock attractor;
  ChecksBlock checks;
  std::filesystem::path output = "out";
  bool plots = false;

  /// Canonical form: every field with defaults applied.
  nlohmann::json to_json() const;
  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return a.to_json() == b.to_json(); }
};

/// Validates a parsed document; ConfigError names the offending key.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Reads and validates a config file; parse errors report line and column.
ExperimentConfig load_config(const std::filesystem::path& file);

struct RunManifest {
  std::string status;  // "ok" or "failed"
  nlohmann::json document;
  std::vector<std::string> files;
  int exit_code = 0;
};

/// Executes the configured task and writes results plus manifest.json into
/// config.output. Failures produce a manifest with status "failed" and the
/// error; they are not rethrown.
RunManifest run_experiment(const ExperimentConfig& config);

}  // namespace fbmlab
