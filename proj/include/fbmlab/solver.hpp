#pragma once

// Pathwise time integration of du = A(t,u) dt + beta u d omega, directly
// (Young-Euler) or through the transform u~ = e^{-beta omega} u, which turns
// the equation into the random ODE u~' = z A(t, u~/z).

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbmlab/models.hpp"
#include "fbmlab/noise.hpp"

namespace fbmlab {

enum class Scheme {
  direct_young,        // u += dt A(u) + beta u d omega
  transform_explicit,  // u~ += dt z A(u~/z)
  transform_imex,      // model's stiff part implicit, rest explicit
  transform_implicit,  // backward Euler, damped Newton
};

std::string_view scheme_name(Scheme scheme);
Scheme parse_scheme(std::string_view name);

struct SolveConfig {
  double dt = 0x1p-10;
  Scheme scheme = Scheme::transform_imex;
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  /// Keep every k-th step; 0 keeps the final state only.
  std::size_t record_every = 1;
  /// Model time = noise time + time_offset.
  double time_offset = 0.0;
  double blowup_threshold = 1e12;

  /// ConfigError unless dt > 0 divides noise_step and tolerances are positive.
  void validate(double noise_step) const;
};

struct Trajectory {
  Scheme scheme;
  double dt;
  double beta;
  std::vector<double> times;
  std::vector<State> states;        // u in the original variable
  std::vector<double> z;            // e^{-beta omega} at the recorded times
  std::vector<double> norm_h;
  std::vector<double> norm_v;
  std::vector<double> v_alpha_integral;  // int_{t0}^t |u|_V^alpha, left-point
  std::size_t steps = 0;
  /// Smallest relative slack of the discrete energy inequality over all steps.
  double energy_slack_min = 0.0;
  int newton_iterations_max = 0;

  const State& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

/// Integrates the transformed equation with a transform-* scheme and maps back
/// to u = u~/z. The transform is re-anchored each step (z_n = 1,
/// z_{n+1} = e^{-beta d_omega_n}), which is the same update in exact arithmetic
/// and makes the result depend on omega only through its increments. Steps of the implicit scheme
/// must satisfy the discrete energy inequality to 1e-8 relative.
Trajectory solve_transformed(const GelfandModel& model, const PathView& path, double beta,
                             std::span<const double> u0, TimeWindow window, const SolveConfig& cfg);

/// Explicit Young-Euler: u_{n+1} = u_n + dt A(t_n, u_n) + beta u_n (omega_{n+1} - omega_n).
Trajectory solve_direct_young(const GelfandModel& model, const PathView& path, double beta,
                              std::span<const double> u0, TimeWindow window, const SolveConfig& cfg);

/// Dispatches on cfg.scheme.
Trajectory solve(const GelfandModel& model, const PathView& path, double beta, std::span<const double> u0,
                 TimeWindow window, const SolveConfig& cfg);

/// sup over grid times of |u_direct - u_transform|_H. The transform route
/// uses cfg.scheme, or transform-imex when cfg.scheme is direct-young.
double equivalence_gap(const GelfandModel& model, const PathView& path, double beta, std::span<const double> u0,
                       TimeWindow window, const SolveConfig& cfg);

struct GronwallSeries {
  std::vector<double> times;
  std::vector<double> lhs;  // |u~1 - u~2|_H^2
  std::vector<double> rhs;  // exp(int (C(s) + rho(u1) + eta(u2)) ds) |u~1(t0) - u~2(t0)|_H^2
  /// max over times of lhs / rhs - 1 (negative when the bound is strict).
  double worst_excess() const;
};

GronwallSeries continuous_dependence_gap(const GelfandModel& model, const PathView& path, double beta,
                                         std::span<const double> u0a, std::span<const double> u0b,
                                         TimeWindow window, const SolveConfig& cfg);

/// Hoelder seminorm of t -> <u(t), v>_H over the recorded (uniform) times.
HolderEstimate pairing_holder_estimate(const GelfandModel& model, const Trajectory& traj,
                                       std::span<const double> v, double exponent);

/// CSV `time,normH,normV[,coeff_0..coeff_{d-1}]`.
std::string trajectory_to_csv(const Trajectory& traj, bool include_coefficients);

/// {scheme, dt, final_normH, energy_slack_max}; energy_slack_max is the
/// largest relative deficit of the discrete energy inequality (0 when it holds).
nlohmann::json trajectory_summary(const Trajectory& traj);

}  // namespace fbmlab
