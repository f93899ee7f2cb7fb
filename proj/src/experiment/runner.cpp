#include <chrono>
#include <cmath>
#include <ctime>
#include <memory>
#include <sstream>

#include "fbmlab/attractor.hpp"
#include "fbmlab/error.hpp"
#include "fbmlab/experiment.hpp"
#include "fbmlab/models.hpp"
#include "fbmlab/noise_io.hpp"
#include "fbmlab/output.hpp"
#include "fbmlab/parallel.hpp"
#include "fbmlab/plots.hpp"
#include "fbmlab/young.hpp"

namespace fbmlab {

namespace {

struct TaskResult {
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<std::pair<std::string, PlotSpec>> plots;
};

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::shared_ptr<const TwoSidedPath> make_path(const NoiseBlock& noise, std::uint64_t seed) {
  const auto past = static_cast<std::size_t>(aligned_index(noise.past, noise.step));
  const auto future = static_cast<std::size_t>(aligned_index(noise.future, noise.step));
  return std::make_shared<const TwoSidedPath>(
      build_two_sided_path(HurstIndex(noise.hurst), noise.step, past, future, seed));
}

SolveConfig solve_config(const SolverBlock& s) {
  SolveConfig cfg;
  cfg.dt = s.dt;
  cfg.scheme = s.scheme;
  cfg.newton_tol = s.newton_tol;
  cfg.newton_max_iter = s.newton_max_iter;
  cfg.record_every = s.record_every;
  return cfg;
}

State initial_state(const GelfandModel& model, const InitialBlock& init) {
  if (init.values) {
    State u = *init.values;
    if (u.size() != model.dimension()) throw ConfigError("solver.initial.values has the wrong dimension");
    return u;
  }
  std::mt19937_64 rng(init.seed);
  return model.random_state(rng, init.scale);
}

// Per-seed work runs in parallel into fixed slots; aggregation stays in seed order.
template <typename F>
auto over_seeds(const std::vector<std::uint64_t>& seeds, F&& body) {
  using R = decltype(body(std::uint64_t{}));
  std::vector<R> out(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) { out[i] = body(seeds[i]); });
  return out;
}

TaskResult task_generate_noise(const ExperimentConfig& cfg) {
  TaskResult res;
  const auto& noise = cfg.noise;
  struct PerSeed {
    std::string csv;
    nlohmann::json manifest;
    nlohmann::json stats;
    std::vector<double> residuals;
  };
  auto work = over_seeds(noise.seeds, [&](std::uint64_t seed) {
    auto path = make_path(noise, seed);
    PerSeed r;
    r.csv = path_to_csv(*path);
    r.manifest = path_manifest(*path);
    PathView view(path);
    nlohmann::json stats{{"seed", seed}};
    if (noise.future >= 2.0 * noise.step) {
      const double exponent = std::max(0.5, noise.hurst - 0.05);
      auto est = holder_seminorm(view, exponent, {0.0, noise.future});
      stats["holder"] = {{"exponent", est.exponent}, {"seminorm", est.seminorm}, {"strided", est.strided}};
    }
    double growth = 0.0;
    for (const auto& g : growth_ratio(view)) growth = std::max(growth, g.ratio);
    stats["growth_ratio_max"] = growth;
    for (double s : noise.residual_steps) {
      const auto factor = static_cast<std::size_t>(std::nearbyint(s / noise.step));
      auto coarse = std::make_shared<const TwoSidedPath>(path->coarsened(factor));
      PathView cv(coarse);
      const TimeWindow window{0.0, coarse->time(coarse->last_index())};
      if (coarse->last_index() < 1) throw ConfigError("noise.future is shorter than a residual step");
      auto cocycle = exp_transform(1.0, cv, window);
      r.residuals.push_back(exp_sde_residual(cocycle, cv, window));
    }
    r.stats = std::move(stats);
    return r;
  });
  nlohmann::json seeds = nlohmann::json::array();
  for (std::size_t i = 0; i < work.size(); ++i) {
    const auto seed = std::to_string(noise.seeds[i]);
    res.files.emplace_back("path_" + seed + ".csv", work[i].csv);
    res.files.emplace_back("path_" + seed + ".json", dump(work[i].manifest));
    seeds.push_back(work[i].stats);
  }
  res.summary["paths"] = seeds;
  if (!noise.residual_steps.empty()) {
    std::ostringstream csv;
    csv << "step,residual_mean\n";
    PlotSeries series{"exp transform residual", {}, {}};
    for (std::size_t j = 0; j < noise.residual_steps.size(); ++j) {
      double mean = 0.0;
      for (const auto& w : work) mean += w.residuals[j];
      mean /= static_cast<double>(work.size());
      csv << format_real(noise.residual_steps[j]) << ',' << format_real(mean) << '\n';
      series.x.push_back(noise.residual_steps[j]);
      series.y.push_back(mean);
    }
    res.files.emplace_back("residuals.csv", csv.str());
    nlohmann::json study{{"steps", series.x}, {"residual_mean", series.y}};
    if (series.x.size() >= 2) {
      try {
        study["fitted_order"] = loglog_slope(series.x, series.y);
      } catch (const DomainError&) {
        study["fitted_order"] = nullptr;
      }
    }
    res.summary["residual_study"] = study;
    res.plots.emplace_back("residuals.svg", PlotSpec{"Exponential transform residual", "step", "residual", true, true,
                                                     true, {series}});
  }
  return res;
}

TaskResult task_solve(const ExperimentConfig& cfg) {
  TaskResult res;
  const ModelPtr model = make_model(*cfg.model);
  const State u0 = initial_state(*model, cfg.solver.initial);
  auto trajs = over_seeds(cfg.noise.seeds, [&](std::uint64_t seed) {
    PathView view(make_path(cfg.noise, seed));
    return solve(*model, view, cfg.solver.beta, u0, {cfg.solver.t0, cfg.solver.t1}, solve_config(cfg.solver));
  });
  nlohmann::json runs = nlohmann::json::array();
  PlotSpec plot{"Solution norm", "time", "|u|_H", false, false, false, {}};
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const auto seed = std::to_string(cfg.noise.seeds[i]);
    res.files.emplace_back("trajectory_" + seed + ".csv", trajectory_to_csv(trajs[i], cfg.solver.coefficients));
    auto s = trajectory_summary(trajs[i]);
    s["seed"] = cfg.noise.seeds[i];
    s["final_normV"] = trajs[i].norm_v.back();
    s["v_alpha_integral"] = trajs[i].v_alpha_integral.back();
    runs.push_back(s);
    if (plot.series.size() < 6) plot.series.push_back({"seed " + seed, trajs[i].times, trajs[i].norm_h});
  }
  res.summary["model"] = model->describe();
  res.summary["runs"] = runs;
  res.plots.emplace_back("norm.svg", plot);
  return res;
}

TaskResult task_equivalence(const ExperimentConfig& cfg) {
  TaskResult res;
  const ModelPtr model = make_model(*cfg.model);
  const State u0 = initial_state(*model, cfg.solver.initial);
  std::vector<double> dts;
  for (std::size_t j = 0; j < cfg.solver.refinements; ++j) dts.push_back(std::ldexp(cfg.solver.dt, -static_cast<int>(j)));
  auto gaps = over_seeds(cfg.noise.seeds, [&](std::uint64_t seed) {
    PathView view(make_path(cfg.noise, seed));
    std::vector<double> g;
    for (double dt : dts) {
      SolveConfig sc = solve_config(cfg.solver);
      sc.dt = dt;
      g.push_back(equivalence_gap(*model, view, cfg.solver.beta, u0, {cfg.solver.t0, cfg.solver.t1}, sc));
    }
    return g;
  });
  std::ostringstream csv;
  csv << "dt,gap_mean";
  for (auto s : cfg.noise.seeds) csv << ",gap_seed_" << s;
  csv << '\n';
  PlotSeries series{"sup-H gap", dts, {}};
  for (std::size_t j = 0; j < dts.size(); ++j) {
    double mean = 0.0;
    for (const auto& g : gaps) mean += g[j];
    mean /= static_cast<double>(gaps.size());
    series.y.push_back(mean);
    csv << format_real(dts[j]) << ',' << format_real(mean);
    for (const auto& g : gaps) csv << ',' << format_real(g[j]);
    csv << '\n';
  }
  res.files.emplace_back("equivalence.csv", csv.str());
  res.summary["dt"] = dts;
  res.summary["gap_mean"] = series.y;
  if (dts.size() >= 2) {
    try {
      res.summary["fitted_order"] = loglog_slope(series.x, series.y);
    } catch (const DomainError&) {
      res.summary["fitted_order"] = nullptr;
    }
  }
  res.plots.emplace_back("equivalence.svg",
                         PlotSpec{"Route equivalence gap", "dt", "gap", true, true, true, {series}});
  return res;
}

TaskResult task_pullback(const ExperimentConfig& cfg, bool with_invariance) {
  TaskResult res;
  const ModelPtr model = make_model(*cfg.model);
  const auto& a = cfg.attractor;
  const auto initial = sample_states(*model, a.initial_points, a.initial_seed, a.initial_scale);
  SolveConfig sc = solve_config(cfg.solver);
  nlohmann::json runs = nlohmann::json::array();
  PlotSpec plot{"Pullback convergence", "pullback depth", "semi-distance to deepest fiber", false, true, false, {}};
  for (auto seed : cfg.noise.seeds) {
    CocycleHandle cocycle(model, cfg.solver.beta, sc, PathView(make_path(cfg.noise, seed)));
    const auto ens = pullback_evolve(cocycle, a.pullback_times, initial, a.fiber_time);
    auto est = attractor_estimate(*model, ens, a.tolerance);
    if (with_invariance && a.invariance_time > 0.0) {
      const auto shifted = pullback_evolve(cocycle, a.pullback_times, initial, a.fiber_time + a.invariance_time);
      const auto est_shifted = attractor_estimate(*model, shifted, a.tolerance);
      est.invariance_gap = attractor_invariance_gap(est, cocycle, a.invariance_time, est_shifted);
    }
    const auto s = std::to_string(seed);
    auto j = to_json(est);
    j["seed"] = seed;
    res.files.emplace_back("ensemble_" + s + ".json", dump(j));
    res.files.emplace_back("fiber_" + s + ".csv", points_to_csv(est.points));
    runs.push_back(j);
    if (plot.series.size() < 6) {
      // The deepest fiber is the reference, so its zero entry is dropped.
      PlotSeries series{"seed " + s, {}, {}};
      for (std::size_t i = 0; i + 1 < est.pullback_times.size(); ++i) {
        series.x.push_back(est.pullback_times[i]);
        series.y.push_back(est.semidist_history[i]);
      }
      plot.series.push_back(std::move(series));
    }
  }
  res.summary["model"] = model->describe();
  res.summary["ensembles"] = runs;
  if (runs.size() == 1) {
    res.summary["diameter"] = runs[0]["diameter"];
    res.summary["converged"] = runs[0]["converged"];
  }
  res.plots.emplace_back("semidist.svg", plot);
  return res;
}

TaskResult task_check_assumptions(const ExperimentConfig& cfg) {
  TaskResult res;
  const ModelPtr base = make_model(*cfg.model);
  const auto& c = cfg.checks;
  const auto pilot = sample_states(*base, c.pilot, c.seed + 1, c.scale, c.spread);
  TripleConstants constants = base->constants();
  const double calibrated = calibrate_growth_constant(*base, c.time, pilot);
  constants.c_bound = std::max(constants.c_bound, calibrated);
  const std::shared_ptr<const GelfandModel> model = base->with_constants(constants);

  const auto samples = sample_states(*model, c.samples, c.seed, c.scale, c.spread);
  std::vector<std::pair<State, State>> pairs;
  for (std::size_t i = 0; i + 1 < samples.size(); i += 2) pairs.emplace_back(samples[i], samples[i + 1]);
  std::vector<std::array<State, 3>> triples;
  for (std::size_t i = 0; i + 2 < samples.size() && triples.size() < 100; i += 3) {
    triples.push_back({samples[i], samples[i + 1], samples[i + 2]});
  }
  const double a1 = check_hemicontinuity(*model, c.time, triples);
  const double a2 = check_local_monotonicity(*model, c.time, pairs);
  const double a3 = check_coercivity(*model, c.time, samples);
  const double growth = check_growth(*model, c.time, samples);
  const double uniq = check_uniqueness_condition(*model, samples);
  const double embed = check_embedding(*model, samples);
  const double floor = -1e-10;
  res.summary = {{"model", model->describe()},
                 {"calibrated_C", calibrated},
                 {"A1_hemicontinuity_slack", a1},
                 {"A2_local_monotonicity_slack", a2},
                 {"A3_coercivity_slack", a3},
                 {"A4_growth_ratio", growth},
                 {"A4_growth_slack", 1.0 - growth},
                 {"uniqueness_ratio", uniq},
                 {"embedding_slack", embed},
                 {"all_hold", a1 >= floor && a2 >= floor && a3 >= floor && 1.0 - growth >= floor &&
                                  uniq <= 1.0 && embed >= floor}};
  return res;
}

TaskResult dispatch(const ExperimentConfig& cfg) {
  switch (cfg.task) {
    case Task::generate_noise: return task_generate_noise(cfg);
    case Task::solve: return task_solve(cfg);
    case Task::equivalence: return task_equivalence(cfg);
    case Task::pullback: return task_pullback(cfg, false);
    case Task::attractor: return task_pullback(cfg, true);
    case Task::check_assumptions: return task_check_assumptions(cfg);
  }
  throw ConfigError("unknown task");
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& config) {
  RunManifest manifest;
  const nlohmann::json canonical = config.to_json();
  // The hash identifies the experiment, not where its results are written.
  nlohmann::json hashed = canonical;
  hashed.erase("output");
  nlohmann::json doc{{"task", task_name(config.task)},
                     {"config_hash", fnv1a_hex(hashed.dump())},
                     {"config", canonical},
                     {"seeds", config.noise.seeds},
                     {"version", FBMLAB_VERSION},
                     {"started", iso_now()}};
  nlohmann::json warnings = nlohmann::json::array();
  std::filesystem::create_directories(config.output);
  try {
    TaskResult res = dispatch(config);
    AtomicOutput out(config.output);
    for (const auto& [name, content] : res.files) out.write(name, content);
    out.write("summary.json", dump(res.summary));
    if (config.plots) {
      for (const auto& [name, spec] : res.plots) {
        if (auto svg = render_svg(spec)) {
          out.write(name, *svg);
        } else {
          warnings.push_back("plot " + name + " skipped: no data");
        }
      }
    }
    out.commit();
    manifest.files = out.files();
    manifest.status = "ok";
    doc["summary"] = res.summary;
  } catch (const ConfigError& e) {
    manifest.status = "failed";
    manifest.exit_code = 2;
    doc["error"] = {{"kind", "config"}, {"message", e.what()}};
  } catch (const std::exception& e) {
    manifest.status = "failed";
    manifest.exit_code = 3;
    doc["error"] = {{"kind", "numerical"}, {"message", e.what()}};
  }
  doc["status"] = manifest.status;
  doc["files"] = manifest.files;
  doc["warnings"] = warnings;
  doc["finished"] = iso_now();
  write_file_atomic(config.output / "manifest.json", dump(doc));
  manifest.document = std::move(doc);
  return manifest;
}

}  // namespace fbmlab
