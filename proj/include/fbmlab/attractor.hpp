#pragma once

// Random-dynamical-systems layer on top of the solver: the cocycle map,
// absorbing radii, temperedness, pullback ensembles and attractor estimates.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbmlab/models.hpp"
#include "fbmlab/noise.hpp"
#include "fbmlab/solver.hpp"

namespace fbmlab {

/// (t, tau, x) -> state at tau + t, solving from tau along one noise path.
class CocycleHandle {
 public:
  CocycleHandle(ModelPtr model, double beta, SolveConfig cfg, PathView path);

  const GelfandModel& model() const { return *model_; }
  const ModelPtr& model_ptr() const { return model_; }
  double beta() const { return beta_; }
  const SolveConfig& config() const { return cfg_; }
  const PathView& path() const { return path_; }

  /// Returns x itself when t == 0.
  State evaluate(double t, double tau, std::span<const double> x) const;
  /// phi(t, omega, x) = evaluate(t, 0, x).
  State phi(double t, std::span<const double> x) const { return evaluate(t, 0.0, x); }
  /// The same system driven by theta_s omega, s = steps * noise step; model
  /// time keeps tracking absolute time.
  CocycleHandle shifted(std::int64_t steps) const;

 private:
  ModelPtr model_;
  double beta_;
  SolveConfig cfg_;
  PathView path_;
};

/// sup_{a in A} inf_{b in B} |a - b|_2 on raw coordinate vectors. Empty A is
/// an error; empty B gives +infinity.
double hausdorff_semidist(std::span<const State> a, std::span<const State> b);

/// Same in the model's H-norm (through its isometric embedding).
double hausdorff_semidist(const GelfandModel& model, std::span<const State> a, std::span<const State> b);

enum class RadiusRegime { alpha_eq_2, alpha_gt_2, nonautonomous };
std::string_view regime_name(RadiusRegime regime);

struct AbsorbingEstimate {
  double radius_sq;
  double truncation_horizon;
  double tail_bound;
  RadiusRegime regime;
  double kappa;     // decay rate in the exponent
  double constant;  // multiplier of the integral (autonomous) or additive constant (alpha > 2)
};

nlohmann::json to_json(const AbsorbingEstimate& e);

/// R^2 = 1 + C' int_{-T}^0 e^{-2 beta omega_r + kappa r} dr by the trapezoid rule
/// on the noise grid, with kappa = lambda gamma - K (alpha = 2) or
/// lambda (gamma - epsilon) (alpha > 2). epsilon defaults to gamma / 2. Without
/// an explicit horizon the quadrature stops once the tail envelope, built from
/// the path's measured growth ratio, drops below 1e-8 of the accumulated value.
AbsorbingEstimate absorbing_radius_autonomous(const PathView& path, const TripleConstants& constants, double beta,
                                              std::optional<double> epsilon = std::nullopt,
                                              std::optional<double> horizon = std::nullopt);

/// R^2(tau) = 1 + int_{-T}^0 (C' + |f(r + tau)|) e^{-2 beta omega_r + kappa r} dr with
/// kappa = lambda c - g (alpha = 2, C' = 0) or lambda (c - epsilon) (alpha > 2).
/// ConfigError unless f is certified exponentially integrable.
AbsorbingEstimate absorbing_radius_nonautonomous(const PathView& path, const TripleConstants& constants, double beta,
                                                 std::optional<double> epsilon, double tau,
                                                 const std::function<double(double)>& f,
                                                 std::optional<double> horizon = std::nullopt);

struct TemperednessReport {
  std::vector<double> etas;
  std::vector<double> times;
  std::vector<std::vector<double>> series;  // e^{-eta t} R^2(theta_{-t} omega), one row per eta
  std::vector<bool> decayed;                // below 1e-6 of the initial value before the horizon
  std::vector<double> decay_time;           // first time below the floor, or NaN
  bool all_decayed() const;
};

/// Evaluates R^2 on theta_{-t} omega for t = 0, spacing, ..., horizon. Every eta
/// must be positive (DomainError otherwise).
TemperednessReport temperedness_stat(const std::function<double(const PathView&)>& radius_fn, const PathView& path,
                                     std::span<const double> etas, double horizon, double spacing = 1.0);

struct PullbackEnsemble {
  double fiber_time;
  std::vector<double> pullback_times;
  std::vector<State> initial_set;
  std::vector<std::vector<State>> fibers;  // fibers[i][j]: start x_j at fiber_time - T_i
};

/// Solves from fiber_time - T with every initial point for every T, in parallel.
PullbackEnsemble pullback_evolve(const CocycleHandle& cocycle, std::span<const double> pullback_times,
                                 std::span<const State> initial_set, double fiber_time);

struct AttractorEstimate {
  std::vector<State> points;
  double fiber_time = 0.0;
  std::vector<double> pullback_times;
  double diameter = 0.0;
  std::vector<double> semidist_history;  // dist(fiber_i, last fiber)
  /// semidist_history's penultimate entry (the last is 0 by construction).
  double convergence_measure = 0.0;
  bool nonincreasing = false;
  bool converged = false;
  double invariance_gap = std::numeric_limits<double>::quiet_NaN();
};

/// Needs at least two pullback times. Converged when the history is
/// nonincreasing (to 1e-9 of its maximum) and the convergence measure is below
/// `tolerance`.
AttractorEstimate attractor_estimate(const GelfandModel& model, const PullbackEnsemble& ensemble,
                                     double tolerance = 1e-3);

/// |phi(t+s, omega, x) - phi(s, theta_t omega, phi(t, omega, x))|_H.
double cocycle_gap(const CocycleHandle& cocycle, double s, double t, std::span<const double> x);

/// Two-sided semi-distance between phi(t, omega, estimate points) and the
/// estimate at the fiber time + t.
double attractor_invariance_gap(const AttractorEstimate& estimate, const CocycleHandle& cocycle, double t,
                                const AttractorEstimate& shifted_estimate);

/// {fiber_time, pullback_times, semidist_history, diameter, invariance_gap, converged}.
nlohmann::json to_json(const AttractorEstimate& estimate);

/// One row per point, columns coeff_0..coeff_{d-1}.
std::string points_to_csv(std::span<const State> points);

}  // namespace fbmlab
