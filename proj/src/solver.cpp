#include "fbmlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fbmlab/error.hpp"
#include "fbmlab/kernels.hpp"
#include "fbmlab/noise_io.hpp"
#include "fbmlab/young.hpp"

namespace fbmlab {

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::direct_young: return "direct-young";
    case Scheme::transform_explicit: return "transform-explicit";
    case Scheme::transform_imex: return "transform-imex";
    case Scheme::transform_implicit: return "transform-implicit";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::direct_young, Scheme::transform_explicit, Scheme::transform_imex,
                   Scheme::transform_implicit}) {
    if (scheme_name(s) == name) return s;
  }
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

void SolveConfig::validate(double noise_step) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  const double ratio = noise_step / dt;
  const double m = std::nearbyint(ratio);
  if (m < 1.0 || std::abs(ratio - m) > 1e-9 * m) {
    throw ConfigError("dt must divide the noise step (dt = " + format_real(dt) + ", step = " + format_real(noise_step) + ")");
  }
  if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
  if (newton_max_iter < 1) throw ConfigError("newton_max_iter must be positive");
  if (!(blowup_threshold > 0.0)) throw ConfigError("blow-up threshold must be positive");
  if (!std::isfinite(time_offset)) throw ConfigError("time offset must be finite");
}

namespace {

// Fine time grid over a window of the noise grid; omega is linearly
// interpolated inside each noise cell.
struct StepGrid {
  const PathView& path;
  std::int64_t k0;
  std::size_t sub;    // fine steps per noise cell
  std::size_t steps;  // total fine steps
  double t0;
  double dt;

  StepGrid(const PathView& p, TimeWindow w, const SolveConfig& cfg) : path(p) {
    cfg.validate(p.step());
    k0 = p.index_of(w.begin);
    const std::int64_t k1 = p.index_of(w.end);
    if (k1 < k0) throw RangeError("solve window ends before it begins");
    if (!p.covers(k0, k1)) throw RangeError("solve window leaves the sampled path");
    sub = static_cast<std::size_t>(std::nearbyint(p.step() / cfg.dt));
    steps = static_cast<std::size_t>(k1 - k0) * sub;
    t0 = static_cast<double>(k0) * p.step();
    dt = p.step() / static_cast<double>(sub);
  }

  double time(std::size_t n) const {
    return t0 + static_cast<double>(n / sub) * path.step() + static_cast<double>(n % sub) * dt;
  }
  double omega(std::size_t n) const {
    const std::int64_t i = k0 + static_cast<std::int64_t>(n / sub);
    const std::size_t j = n % sub;
    if (j == 0) return path.at(i);
    return path.at(i) + (static_cast<double>(j) / static_cast<double>(sub)) * path.increment(i);
  }
  double d_omega(std::size_t n) const {
    const double inc = path.increment(k0 + static_cast<std::int64_t>(n / sub));
    return sub == 1 ? inc : inc / static_cast<double>(sub);
  }
  double z(double beta, std::size_t n) const {
    const double e = -beta * omega(n);
    if (std::abs(e) > 700.0) throw RangeError("exponential transform overflows at t = " + format_real(time(n)));
    return std::exp(e);
  }
};

State scaled(double a, std::span<const double> x) {
  State y(x.size());
  kernels::scale_into(a, x, y);
  return y;
}

class Recorder {
 public:
  Recorder(const GelfandModel& model, const StepGrid& grid, const SolveConfig& cfg, double beta)
      : model_(model), grid_(grid), cfg_(cfg), alpha_(model.constants().alpha) {
    traj_.scheme = cfg.scheme;
    traj_.dt = grid.dt;
    traj_.beta = beta;
    traj_.steps = grid.steps;
    traj_.energy_slack_min = std::numeric_limits<double>::infinity();
  }

  // Called for n = 0..steps with u_n and z_n; integrates |u|_V^alpha left-point.
  void visit(std::size_t n, std::span<const double> u, double z) {
    const double nh = model_.norm_h(u);
    if (!std::isfinite(nh) || nh > cfg_.blowup_threshold) {
      throw NumericalError("solution blew up at t = " + format_real(grid_.time(n)) + " (|u|_H = " + format_real(nh) + ")");
    }
    const double nv = model_.norm_v(u);
    const bool keep = n == grid_.steps || (cfg_.record_every > 0 && n % cfg_.record_every == 0);
    if (keep) {
      traj_.times.push_back(grid_.time(n));
      traj_.states.emplace_back(u.begin(), u.end());
      traj_.z.push_back(z);
      traj_.norm_h.push_back(nh);
      traj_.norm_v.push_back(nv);
      traj_.v_alpha_integral.push_back(integral_.value());
    }
    integral_.add(grid_.dt * std::pow(nv, alpha_));
  }

  // Discrete energy inequality for u~ between consecutive steps, evaluated at the new state.
  double energy_slack(double h_old_sq, std::span<const double> u_new, double z_new, double t_new) {
    const auto& c = model_.constants();
    const double nh = model_.norm_h(u_new);
    const double nv = model_.norm_v(u_new);
    const double z2 = z_new * z_new;
    const double h_new_sq = z2 * nh * nh;
    const double level = model_.forcing_level(t_new);
    const double rhs = z2 * (-c.gamma_coercive * std::pow(nv, c.alpha) + c.k_coercive * nh * nh + level);
    const double scale = h_old_sq + h_new_sq +
                         grid_.dt * z2 * (c.gamma_coercive * std::pow(nv, c.alpha) + c.k_coercive * nh * nh + level) +
                         std::numeric_limits<double>::min();
    const double rel = (grid_.dt * rhs - (h_new_sq - h_old_sq)) / scale;
    traj_.energy_slack_min = std::min(traj_.energy_slack_min, rel);
    return rel;
  }

  Trajectory& trajectory() { return traj_; }

 private:
  const GelfandModel& model_;
  const StepGrid& grid_;
  const SolveConfig& cfg_;
  double alpha_;
  CompensatedSum integral_;
  Trajectory traj_;
};

State newton_step(const GelfandModel& model, const State& prev, double t, double dt, double z, const SolveConfig& cfg,
                  std::size_t step, int& iterations) {
  auto residual = [&](const State& v) {
    State g(v.begin(), v.end());
    kernels::axpy(-1.0, prev, g);
    kernels::axpy(-dt * z, model.apply(t, scaled(1.0 / z, v)), g);
    return g;
  };
  State v = prev;
  State g = residual(v);
  double g_norm = model.norm_h(g);
  for (int it = 1; it <= cfg.newton_max_iter; ++it) {
    iterations = it;
    if (g_norm == 0.0) return v;
    State rhs = scaled(-1.0, g);
    State delta = model.solve_shifted_jacobian(t, scaled(1.0 / z, v), dt, rhs);
    const double d_norm = model.norm_h(delta);
    const double scale = 1.0 + model.norm_h(v);
    if (d_norm <= cfg.newton_tol * scale) {
      kernels::axpy(1.0, delta, v);
      return v;
    }
    double lambda = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving, lambda *= 0.5) {
      State cand = v;
      kernels::axpy(lambda, delta, cand);
      State gc = residual(cand);
      const double gc_norm = model.norm_h(gc);
      if (std::isfinite(gc_norm) && gc_norm <= (1.0 - 1e-4 * lambda) * g_norm) {
        v = std::move(cand);
        g = std::move(gc);
        g_norm = gc_norm;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw NumericalError("Newton line search failed at step " + std::to_string(step) + " (t = " + format_real(t) + ")");
    }
    if (lambda * d_norm <= cfg.newton_tol * scale) return v;
  }
  throw NumericalError("Newton did not converge in " + std::to_string(cfg.newton_max_iter) + " iterations at step " +
                       std::to_string(step) + " (t = " + format_real(t) + ")");
}

void check_initial(const GelfandModel& model, std::span<const double> u0) { model.validate_state(u0); }

}  // namespace

Trajectory solve_transformed(const GelfandModel& model, const PathView& path, double beta, std::span<const double> u0,
                             TimeWindow window, const SolveConfig& cfg) {
  if (cfg.scheme == Scheme::direct_young) throw ConfigError("solve_transformed needs a transform-* scheme");
  check_initial(model, u0);
  StepGrid grid(path, window, cfg);
  Recorder rec(model, grid, cfg, beta);
  const double dt = grid.dt;

  // The transform is re-anchored at every step: z_n = 1, z_{n+1} = e^{-beta d_omega_n}.
  // In exact arithmetic this is the same update as a global anchor, but each step depends only on
  // (u_n, d_omega_n, t_n), so split solves and shifted paths replay bit for bit, and e^{beta omega} never overflows.
  const double z = 1.0;
  State v(u0.begin(), u0.end());
  rec.visit(0, u0, grid.z(beta, 0));
  for (std::size_t n = 0; n < grid.steps; ++n) {
    const double t = grid.time(n) + cfg.time_offset;
    const double e = -beta * grid.d_omega(n);
    if (std::abs(e) > 700.0) throw RangeError("exponential transform overflows at t = " + format_real(grid.time(n)));
    const double z_next = std::exp(e);
    const double h_old = model.norm_h(v);
    State next;
    switch (cfg.scheme) {
      case Scheme::transform_explicit: {
        next = v;
        kernels::axpy(dt * z, model.apply(t, scaled(1.0 / z, v)), next);
        break;
      }
      case Scheme::transform_imex: next = model.imex_step(t, dt, z, v); break;
      case Scheme::transform_implicit: {
        int iterations = 0;
        next = newton_step(model, v, grid.time(n + 1) + cfg.time_offset, dt, z_next, cfg, n, iterations);
        rec.trajectory().newton_iterations_max = std::max(rec.trajectory().newton_iterations_max, iterations);
        break;
      }
      case Scheme::direct_young: break;
    }
    State u_next = scaled(1.0 / z_next, next);
    const double slack = rec.energy_slack(h_old * h_old, u_next, z_next, grid.time(n + 1) + cfg.time_offset);
    if (cfg.scheme == Scheme::transform_implicit && slack < -1e-8) {
      throw NumericalError("energy inequality violated at step " + std::to_string(n) + " (relative slack " +
                           format_real(slack) + ")");
    }
    rec.visit(n + 1, u_next, grid.z(beta, n + 1));
    v = std::move(u_next);
  }
  if (grid.steps == 0) rec.trajectory().energy_slack_min = 0.0;
  return std::move(rec.trajectory());
}

Trajectory solve_direct_young(const GelfandModel& model, const PathView& path, double beta, std::span<const double> u0,
                              TimeWindow window, const SolveConfig& cfg) {
  check_initial(model, u0);
  SolveConfig local = cfg;
  local.scheme = Scheme::direct_young;
  StepGrid grid(path, window, local);
  Recorder rec(model, grid, local, beta);
  const double dt = grid.dt;

  State u(u0.begin(), u0.end());
  double z = grid.z(beta, 0);
  rec.visit(0, u, z);
  for (std::size_t n = 0; n < grid.steps; ++n) {
    const double t = grid.time(n) + cfg.time_offset;
    State next = u;
    kernels::axpy(dt, model.apply(t, u), next);
    kernels::axpy(beta * grid.d_omega(n), u, next);
    const double z_next = grid.z(beta, n + 1);
    const double h_old = z * model.norm_h(u);
    rec.energy_slack(h_old * h_old, next, z_next, grid.time(n + 1) + cfg.time_offset);
    u = std::move(next);
    z = z_next;
    rec.visit(n + 1, u, z);
  }
  if (grid.steps == 0) rec.trajectory().energy_slack_min = 0.0;
  return std::move(rec.trajectory());
}

Trajectory solve(const GelfandModel& model, const PathView& path, double beta, std::span<const double> u0,
                 TimeWindow window, const SolveConfig& cfg) {
  if (cfg.scheme == Scheme::direct_young) return solve_direct_young(model, path, beta, u0, window, cfg);
  return solve_transformed(model, path, beta, u0, window, cfg);
}

double equivalence_gap(const GelfandModel& model, const PathView& path, double beta, std::span<const double> u0,
                       TimeWindow window, const SolveConfig& cfg) {
  SolveConfig direct = cfg;
  direct.scheme = Scheme::direct_young;
  direct.record_every = 1;
  SolveConfig transform = direct;
  transform.scheme = cfg.scheme == Scheme::direct_young ? Scheme::transform_imex : cfg.scheme;
  const Trajectory a = solve_direct_young(model, path, beta, u0, window, direct);
  const Trajectory b = solve_transformed(model, path, beta, u0, window, transform);
  double gap = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    State d = a.states[i];
    kernels::axpy(-1.0, b.states[i], d);
    gap = std::max(gap, model.norm_h(d));
  }
  return gap;
}

double GronwallSeries::worst_excess() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (lhs[i] == 0.0 && rhs[i] == 0.0) {
      worst = std::max(worst, -1.0);
      continue;
    }
    worst = std::max(worst, rhs[i] > 0.0 ? lhs[i] / rhs[i] - 1.0 : std::numeric_limits<double>::infinity());
  }
  return worst;
}

GronwallSeries continuous_dependence_gap(const GelfandModel& model, const PathView& path, double beta,
                                         std::span<const double> u0a, std::span<const double> u0b, TimeWindow window,
                                         const SolveConfig& cfg) {
  SolveConfig every = cfg;
  every.record_every = 1;
  const Trajectory a = solve(model, path, beta, u0a, window, every);
  const Trajectory b = solve(model, path, beta, u0b, window, every);
  GronwallSeries out;
  CompensatedSum exponent;
  double initial = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    State d = a.states[i];
    kernels::axpy(-1.0, b.states[i], d);
    const double nd = a.z[i] * model.norm_h(d);
    const double lhs = nd * nd;
    if (i == 0) initial = lhs;
    out.times.push_back(a.times[i]);
    out.lhs.push_back(lhs);
    out.rhs.push_back(std::exp(exponent.value()) * initial);
    const double t = a.times[i] + cfg.time_offset;
    exponent.add(a.dt * (model.monotone_level(t) + model.rho(a.states[i]) + model.eta(b.states[i])));
  }
  return out;
}

HolderEstimate pairing_holder_estimate(const GelfandModel& model, const Trajectory& traj, std::span<const double> v,
                                       double exponent) {
  if (traj.states.empty()) throw DomainError("trajectory is empty");
  std::vector<double> series;
  series.reserve(traj.states.size());
  for (const auto& u : traj.states) series.push_back(model.inner_h(u, v));
  if (series.size() < 2) return {exponent, 0.0, {traj.times.front(), traj.times.front()}, false};
  const double step = traj.times[1] - traj.times[0];
  auto est = holder_seminorm(series, traj.times.front(), step, exponent);
  est.window = {traj.times.front(), traj.times.back()};
  return est;
}

std::string trajectory_to_csv(const Trajectory& traj, bool include_coefficients) {
  std::ostringstream out;
  out << "time,normH,normV";
  const std::size_t dim = traj.states.empty() ? 0 : traj.states.front().size();
  if (include_coefficients) {
    for (std::size_t j = 0; j < dim; ++j) out << ",coeff_" << j;
  }
  out << '\n';
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out << format_real(traj.times[i]) << ',' << format_real(traj.norm_h[i]) << ',' << format_real(traj.norm_v[i]);
    if (include_coefficients) {
      for (double c : traj.states[i]) out << ',' << format_real(c);
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json trajectory_summary(const Trajectory& traj) {
  return {{"scheme", scheme_name(traj.scheme)},
          {"dt", traj.dt},
          {"steps", traj.steps},
          {"final_normH", traj.norm_h.empty() ? 0.0 : traj.norm_h.back()},
          {"energy_slack_max", std::max(0.0, -traj.energy_slack_min)}};
}

}  // namespace fbmlab
