#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "fbmlab/error.hpp"
#include "fbmlab/models.hpp"
#include "fbmlab/solver.hpp"
#include "support/stats.hpp"

using namespace fbmlab;
namespace st = fbmlab::testing;

namespace {

std::shared_ptr<const TwoSidedPath> fbm(double step, std::size_t past, std::size_t future, std::uint64_t seed) {
  return std::make_shared<const TwoSidedPath>(build_two_sided_path(HurstIndex(0.75), step, past, future, seed));
}

// u_t = u0 exp(-a (t - t0) + beta (omega_t - omega_t0)) for A(u) = -a u.
double linear_closed_form(double a, double beta, double u0, const PathView& w, double t0, double t) {
  return u0 * std::exp(-a * (t - t0) + beta * (w.at(w.index_of(t)) - w.at(w.index_of(t0))));
}

SolveConfig config(Scheme scheme, double dt) {
  SolveConfig c;
  c.scheme = scheme;
  c.dt = dt;
  return c;
}

}  // namespace

TEST_CASE("scheme names round trip") {
  for (Scheme s : {Scheme::direct_young, Scheme::transform_explicit, Scheme::transform_imex,
                   Scheme::transform_implicit}) {
    CHECK(parse_scheme(scheme_name(s)) == s);
  }
  CHECK(scheme_name(Scheme::direct_young) == "direct-young");
  CHECK_THROWS_AS(parse_scheme("rk4"), ConfigError);
}

TEST_CASE("solve config validation") {
  SolveConfig c;
  c.dt = 0x1p-12;
  CHECK_NOTHROW(c.validate(0x1p-10));
  CHECK_NOTHROW(c.validate(0x1p-12));
  CHECK_THROWS_AS(c.validate(0x1p-13), ConfigError);
  c.dt = 0.0003;
  CHECK_THROWS_AS(c.validate(0x1p-10), ConfigError);
  c.dt = 0x1p-12;
  c.newton_tol = 0.0;
  CHECK_THROWS_AS(c.validate(0x1p-10), ConfigError);
}

TEST_CASE("transform route reproduces the linear closed form") {
  const double a = 1.0, beta = 0.6, u0 = 1.7;
  const auto base = fbm(0x1p-12, 0, 1u << 12, 5);
  PathView w(base);
  LinearModel m(a, 0.0);
  for (Scheme s : {Scheme::transform_explicit, Scheme::transform_imex, Scheme::transform_implicit}) {
    const auto traj = solve_transformed(m, w, beta, State{u0}, {0.0, 1.0}, config(s, 0x1p-12));
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == 1.0);
    CHECK(traj.steps == 4096);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const double exact = linear_closed_form(a, beta, u0, w, 0.0, traj.times[i]);
      worst = std::max(worst, std::abs(traj.states[i][0] - exact) / std::abs(exact));
      CHECK(traj.norm_h[i] >= 0.0);
      CHECK(traj.z[i] == doctest::Approx(std::exp(-beta * w.at(w.index_of(traj.times[i])))));
    }
    CAPTURE(scheme_name(s));
    CHECK(worst < 1e-3);
  }
  CHECK_THROWS_AS(solve_transformed(m, w, beta, State{u0}, {0.0, 1.0}, config(Scheme::direct_young, 0x1p-12)),
                  ConfigError);
}

TEST_CASE("without noise the direct route is forward euler") {
  const auto base = fbm(0x1p-6, 0, 64, 1);
  PathView w(base);
  LinearModel m(2.0, 0.0);
  const auto direct = solve_direct_young(m, w, 0.0, State{1.0}, {0.0, 1.0}, config(Scheme::direct_young, 0x1p-6));
  const auto expl =
      solve_transformed(m, w, 0.0, State{1.0}, {0.0, 1.0}, config(Scheme::transform_explicit, 0x1p-6));
  for (std::size_t i = 0; i < direct.times.size(); ++i) {
    CHECK(direct.states[i][0] == doctest::Approx(std::pow(1.0 - 2.0 * 0x1p-6, static_cast<double>(i))).epsilon(1e-13));
    CHECK(direct.states[i][0] == expl.states[i][0]);
  }
  // First-order convergence to e^{-2}.
  std::vector<double> steps, errs;
  for (int k = 4; k <= 10; ++k) {
    const double dt = std::ldexp(1.0, -k);
    const auto grid = fbm(dt, 0, std::size_t{1} << k, 1);
    const auto t = solve_direct_young(m, PathView(grid), 0.0, State{1.0}, {0.0, 1.0}, config(Scheme::direct_young, dt));
    steps.push_back(dt);
    errs.push_back(std::abs(t.final_state()[0] - std::exp(-2.0)));
  }
  CHECK(st::observed_order(steps, errs) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(equivalence_gap(m, w, 0.0, State{1.0}, {0.0, 1.0}, config(Scheme::transform_explicit, 0x1p-6)) <= 1e-12);
}

TEST_CASE("direct young route converges to the closed form") {
  const double a = 1.0, beta = 0.5, u0 = 1.0;
  std::vector<double> steps, errs;
  std::vector<std::shared_ptr<const TwoSidedPath>> bases;
  for (std::uint64_t s = 0; s < 5; ++s) bases.push_back(fbm(0x1p-14, 0, 1u << 14, 100 + s));
  LinearModel m(a, 0.0);
  for (int k = 6; k <= 14; k += 2) {
    std::vector<double> e;
    for (const auto& b : bases) {
      const auto coarse = std::make_shared<const TwoSidedPath>(b->coarsened(std::size_t{1} << (14 - k)));
      PathView w(coarse);
      SolveConfig c = config(Scheme::direct_young, coarse->step());
      c.record_every = 0;
      const auto traj = solve_direct_young(m, w, beta, State{u0}, {0.0, 1.0}, c);
      CHECK(traj.states.size() == 1);
      e.push_back(std::abs(traj.final_state()[0] - linear_closed_form(a, beta, u0, w, 0.0, 1.0)));
    }
    steps.push_back(std::ldexp(1.0, -k));
    errs.push_back(st::mean(e));
  }
  CHECK(st::observed_order(steps, errs) >= 0.4);
}

TEST_CASE("linear equivalence gap shrinks under refinement") {
  const auto base = fbm(0x1p-12, 0, 1u << 12, 8);
  LinearModel m(1.0, 0.5);
  std::vector<double> steps, gaps;
  for (int k = 6; k <= 12; ++k) {
    const auto coarse = std::make_shared<const TwoSidedPath>(base->coarsened(std::size_t{1} << (12 - k)));
    SolveConfig c = config(Scheme::transform_imex, coarse->step());
    steps.push_back(coarse->step());
    gaps.push_back(equivalence_gap(m, PathView(coarse), 0.5, State{2.0}, {0.0, 1.0}, c));
  }
  CHECK(st::observed_order(steps, gaps) >= 0.4);
}

TEST_CASE("porous medium routes agree") {
  PorousMediumModel m(3.0, 16);
  std::mt19937_64 rng(4);
  const State u0 = m.random_state(rng, 1.0);
  const auto base = fbm(0x1p-12, 0, 1u << 12, 12);
  PathView w(base);
  const double gap = equivalence_gap(m, w, 0.3, u0, {0.0, 1.0}, config(Scheme::transform_imex, 0x1p-12));
  CHECK(gap < 1e-2);

  // Energy decay of the transformed state when C = K = 0.
  const auto coarse = std::make_shared<const TwoSidedPath>(base->coarsened(4));
  const auto traj =
      solve_transformed(m, PathView(coarse), 0.3, u0, {0.0, 1.0}, config(Scheme::transform_implicit, 0x1p-10));
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    CHECK(traj.norm_h[i] * traj.z[i] <= traj.norm_h[i - 1] * traj.z[i - 1] * (1 + 1e-12));
  }
  CHECK(traj.energy_slack_min >= -1e-8);
  CHECK(traj.newton_iterations_max >= 1);
  CHECK(traj.v_alpha_integral.back() > 0.0);
  for (std::size_t i = 1; i < traj.times.size(); ++i) CHECK(traj.v_alpha_integral[i] >= traj.v_alpha_integral[i - 1]);

  // Halving dt changes the implicit solution only at discretization level.
  const auto half = solve_transformed(m, PathView(coarse), 0.3, u0, {0.0, 1.0},
                                      config(Scheme::transform_implicit, 0x1p-11));
  double diff = 0.0;
  for (std::size_t i = 0; i < u0.size(); ++i) diff += std::pow(half.final_state()[i] - traj.final_state()[i], 2);
  CHECK(std::sqrt(diff) < 1e-2 * (1 + traj.norm_h.back()));
}

TEST_CASE("solves are deterministic and satisfy the grid semigroup property") {
  PorousMediumModel m(2.0, 12);
  std::mt19937_64 rng(6);
  const State u0 = m.random_state(rng, 1.0);
  const auto base = fbm(0x1p-9, 512, 512, 13);
  PathView w(base);
  for (Scheme s : {Scheme::direct_young, Scheme::transform_explicit, Scheme::transform_imex,
                   Scheme::transform_implicit}) {
    CAPTURE(scheme_name(s));
    SolveConfig c = config(s, 0x1p-10);
    const auto full = solve(m, w, 0.4, u0, {-0.5, 0.5}, c);
    const auto again = solve(m, w, 0.4, u0, {-0.5, 0.5}, c);
    CHECK(full.states == again.states);
    const auto first = solve(m, w, 0.4, u0, {-0.5, 0.0}, c);
    const auto second = solve(m, w, 0.4, first.final_state(), {0.0, 0.5}, c);
    double gap = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i) gap = std::max(gap, std::abs(second.final_state()[i] - full.final_state()[i]));
    if (s == Scheme::transform_implicit) {
      CHECK(gap <= 10 * c.newton_tol * (1 + full.norm_h.back()));
    } else {
      CHECK(gap == 0.0);
    }
    // A shifted path with a matching time offset replays the same solve.
    SolveConfig shifted = c;
    shifted.time_offset = -0.25;
    const auto via_shift = solve(m, w.shifted(-128), 0.4, u0, {-0.25, 0.75}, shifted);
    // Every step depends only on the increment of omega, and shifted views carry the base increments.
    CHECK(via_shift.final_state() == full.final_state());
  }
}

TEST_CASE("solver errors") {
  LinearModel lin(1.0, 0.0);
  const auto base = fbm(0x1p-6, 0, 64, 2);
  PathView w(base);
  CHECK_THROWS_AS(solve(lin, w, 0.5, State{1.0}, {0.0, 2.0}, config(Scheme::transform_imex, 0x1p-6)), RangeError);
  CHECK_THROWS_AS(solve(lin, w, 0.5, State{1.0}, {0.0, 0.3}, config(Scheme::transform_imex, 0x1p-6)), RangeError);
  CHECK_THROWS_AS(solve(lin, w, 0.5, State{1.0}, {0.0, 1.0}, config(Scheme::transform_imex, 0.1)), ConfigError);
  CHECK_THROWS_AS(solve(lin, w, 0.5, State{std::nan("")}, {0.0, 1.0}, config(Scheme::transform_imex, 0x1p-6)),
                  Error);

  // Explicit stepping of a stiff problem explodes and is reported.
  LinearModel stiff(1000.0, 0.0);
  CHECK_THROWS_AS(solve(stiff, w, 0.0, State{1.0}, {0.0, 1.0}, config(Scheme::direct_young, 0x1p-6)), NumericalError);

  NavierStokesModel nse(1.0, 4);
  std::mt19937_64 rng(1);
  const State u0 = nse.random_state(rng, 1.0);
  CHECK_THROWS_AS(solve(nse, w, 0.5, u0, {0.0, 0.5}, config(Scheme::transform_implicit, 0x1p-6)), ConfigError);
}

TEST_CASE("continuous dependence") {
  const auto base = fbm(0x1p-10, 0, 1024, 3);
  PathView w(base);
  LinearModel lin(1.5, 0.0, [] {
    auto c = LinearModel::default_constants(1.5, 0.0);
    c.c_monotone = 0.0;
    return c;
  }());
  const SolveConfig c = config(Scheme::transform_imex, 0x1p-10);
  const auto same = continuous_dependence_gap(lin, w, 0.5, State{1.0}, State{1.0}, {0.0, 1.0}, c);
  for (double v : same.lhs) CHECK(v == 0.0);
  CHECK(same.worst_excess() <= 0.0);

  const auto g = continuous_dependence_gap(lin, w, 0.5, State{1.0}, State{-2.0}, {0.0, 1.0}, c);
  const double d0 = 9.0 * std::exp(-2 * 0.5 * w.at(0));
  CHECK(g.rhs.front() == doctest::Approx(d0));
  for (std::size_t i = 0; i < g.times.size(); ++i) {
    CHECK(g.rhs[i] == doctest::Approx(d0));
    // Implicit-explicit Euler contracts slightly faster than the exact flow.
    CHECK(g.lhs[i] <= d0 * std::exp(-2 * 1.5 * g.times[i]) * (1 + 1e-2));
  }
  CHECK(g.worst_excess() <= 0.0);
  for (std::size_t i = 1; i < g.times.size(); ++i) CHECK(g.lhs[i] < g.rhs[i]);

  NavierStokesModel nse(1.0, 6);
  const auto samples = sample_states(nse, 10, 4);
  const auto nbase = fbm(0x1p-8, 0, 256, 4);
  for (std::size_t i = 0; i + 1 < samples.size(); i += 2) {
    const auto ng = continuous_dependence_gap(nse, PathView(nbase), 0.5, samples[i], samples[i + 1], {0.0, 0.5},
                                              config(Scheme::transform_imex, 0x1p-9));
    CHECK(ng.worst_excess() <= 1e-6);
  }
}

TEST_CASE("pairing regularity estimates") {
  LinearModel steady(2.0, 1.0);
  const auto base = fbm(0x1p-12, 0, 1u << 12, 15);
  PathView w(base);
  const auto flat = solve(steady, w, 0.0, State{0.5}, {0.0, 1.0}, config(Scheme::transform_imex, 0x1p-12));
  CHECK(pairing_holder_estimate(steady, flat, State{1.0}, 0.5).seminorm == 0.0);

  LinearModel lin(1.0, 0.0);
  auto estimate = [&](std::size_t factor, double exponent) {
    const auto coarse = std::make_shared<const TwoSidedPath>(base->coarsened(factor));
    const auto traj =
        solve(lin, PathView(coarse), 0.8, State{1.0}, {0.0, 1.0}, config(Scheme::transform_imex, coarse->step()));
    return pairing_holder_estimate(lin, traj, State{1.0}, exponent).seminorm;
  };
  // Both grids stay below the 4096-sample limit of the all-pairs scan.
  const double e1 = estimate(4, 0.25), e2 = estimate(2, 0.25);
  CHECK(std::isfinite(e2));
  CHECK(std::abs(e2 - e1) <= 0.1 * e2);
  CHECK(estimate(2, 0.95) > 1.2 * estimate(32, 0.95));
}

TEST_CASE("trajectory export") {
  LinearModel lin(1.0, 0.0);
  const auto base = fbm(0.25, 0, 4, 1);
  const auto traj = solve(lin, PathView(base), 0.5, State{1.0}, {0.0, 1.0}, config(Scheme::transform_imex, 0.25));
  const auto csv = trajectory_to_csv(traj, true);
  CHECK(csv.rfind("time,normH,normV,coeff_0\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(trajectory_to_csv(traj, false).rfind("time,normH,normV\n", 0) == 0);
  const auto s = trajectory_summary(traj);
  CHECK(s.at("scheme") == "transform-imex");
  CHECK(s.at("dt") == 0.25);
  CHECK(s.at("final_normH") == traj.norm_h.back());
  CHECK(s.at("energy_slack_max").get<double>() >= 0.0);
}
