#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fbmlab/error.hpp"
#include "fbmlab/models.hpp"

using namespace fbmlab;

namespace {

constexpr double kPi = std::numbers::pi;

// Dense Dirichlet Laplacian on n interior nodes of (0, 1).
Eigen::MatrixXd dense_laplacian(std::size_t n) {
  const double dx = 1.0 / static_cast<double>(n + 1);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    l(i, i) = -2.0 / (dx * dx);
    if (i > 0) l(i, i - 1) = 1.0 / (dx * dx);
    if (i + 1 < static_cast<Eigen::Index>(n)) l(i, i + 1) = 1.0 / (dx * dx);
  }
  return l;
}

Eigen::VectorXd as_eigen(const State& s) { return Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size())); }

// Velocity and its gradient at a point, by direct summation over the stored modes.
struct PointField {
  double u[2];
  double du[2][2];  // du[c][axis]
};

PointField evaluate(const NavierStokesModel& m, const State& s, double x1, double x2) {
  PointField p{};
  const auto& modes = m.modes();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const double k1 = modes[i].first, k2 = modes[i].second;
    const std::complex<double> e = std::polar(1.0, k1 * x1 + k2 * x2);
    for (int c = 0; c < 2; ++c) {
      const std::complex<double> coef(s[4 * i + 2 * c], s[4 * i + 2 * c + 1]);
      const std::complex<double> v = coef * e;
      p.u[c] += 2.0 * v.real();
      p.du[c][0] += 2.0 * (std::complex<double>(0, k1) * v).real();
      p.du[c][1] += 2.0 * (std::complex<double>(0, k2) * v).real();
    }
  }
  return p;
}

// -int ((u . grad) u) . w over the torus, trapezoid rule on an m x m grid.
double advection_pairing_oracle(const NavierStokesModel& m, const State& u, const State& w, std::size_t grid) {
  const double h = 2 * kPi / static_cast<double>(grid);
  double total = 0.0;
  for (std::size_t a = 0; a < grid; ++a) {
    for (std::size_t b = 0; b < grid; ++b) {
      const double x1 = h * static_cast<double>(a), x2 = h * static_cast<double>(b);
      const auto pu = evaluate(m, u, x1, x2);
      const auto pw = evaluate(m, w, x1, x2);
      for (int c = 0; c < 2; ++c) total -= (pu.u[0] * pu.du[c][0] + pu.u[1] * pu.du[c][1]) * pw.u[c];
    }
  }
  return total * h * h;
}

State field_from_functions(const NavierStokesModel& m, double (*f1)(double, double), double (*f2)(double, double),
                           std::size_t grid) {
  std::vector<double> g1(grid * grid), g2(grid * grid);
  const double h = 2 * kPi / static_cast<double>(grid);
  for (std::size_t a = 0; a < grid; ++a) {
    for (std::size_t b = 0; b < grid; ++b) {
      g1[a * grid + b] = f1(h * static_cast<double>(a), h * static_cast<double>(b));
      g2[a * grid + b] = f2(h * static_cast<double>(a), h * static_cast<double>(b));
    }
  }
  return m.from_grid(g1, g2, grid);
}

double max_abs(const State& s) {
  double v = 0.0;
  for (double x : s) v = std::max(v, std::abs(x));
  return v;
}

}  // namespace

TEST_CASE("triple constants validation") {
  TripleConstants c;
  CHECK_NOTHROW(c.validate());
  c.alpha = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.alpha = 2.0;
  c.k_coercive = 1.0;  // K must stay below gamma * lambda when alpha = 2
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.alpha = 3.0;
  CHECK_NOTHROW(c.validate());
  c.lambda_embed = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(to_json(TripleConstants{}).at("alpha") == 2.0);
}

TEST_CASE("linear model") {
  CHECK(linear_apply(1.0, 3.0, State{0.0})[0] == 3.0);
  CHECK(linear_apply(1.0, 0.0, State{2.0})[0] == -2.0);
  CHECK_THROWS_AS(LinearModel(0.0, 1.0), ConfigError);

  const double a = 1.3, g = 0.7;
  LinearModel m(a, g);
  const auto samples = sample_states(m, 1000, 1, 3.0, 2.0);
  for (const auto& u : samples) {
    const double au = m.apply(0.0, u)[0];
    CHECK(2 * au * u[0] + a * u[0] * u[0] - g * g / a <= 1e-12 * (1 + u[0] * u[0]));
  }
  CHECK(check_coercivity(m, 0.0, samples) >= 0.0);
  CHECK(check_growth(m, 0.0, samples) <= 1.0);
  CHECK(check_embedding(m, samples) >= 0.0);

  LinearModel homogeneous(1.0, 0.0);
  const State zero{0.0};
  CHECK(check_growth(homogeneous, 0.0, std::vector<State>{zero}) == 0.0);

  std::vector<std::pair<State, State>> pairs;
  for (std::size_t i = 0; i + 1 < samples.size(); i += 2) pairs.emplace_back(samples[i], samples[i + 1]);
  // Slack reduces to 2a |v1 - v2|^2 with the monotonicity constant zero.
  double expected = 1e300;
  for (const auto& [v1, v2] : pairs) expected = std::min(expected, 2 * a * (v1[0] - v2[0]) * (v1[0] - v2[0]));
  CHECK(check_local_monotonicity(m, 0.0, pairs) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(check_local_monotonicity(m, 0.0, std::vector<std::pair<State, State>>{{State{1.5}, State{1.5}}}) == 0.0);
}

TEST_CASE("porous medium operator matches a dense oracle") {
  const std::size_t n = 8;
  PorousMediumModel m(3.0, n);
  const Eigen::MatrixXd l = dense_laplacian(n);
  const Eigen::MatrixXd neg_inv = (-l).inverse();
  const double dx = m.spacing();
  CHECK(pme_apply(3.0, State(n, 0.0)) == State(n, 0.0));
  CHECK_THROWS_AS(pme_apply(1.0, State(n, 1.0)), DomainError);
  CHECK_THROWS_AS(PorousMediumModel(1.0, n), ConfigError);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const State u = m.random_state(rng, 1.0 + trial % 7);
    const State v = m.random_state(rng, 1.0);
    Eigen::VectorXd phi(static_cast<Eigen::Index>(n));
    double lp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      phi(static_cast<Eigen::Index>(i)) = std::pow(std::abs(u[i]), 2.0) * u[i];
      lp += std::pow(std::abs(u[i]), 4.0) * dx;
    }
    const Eigen::VectorXd oracle = l * phi;
    const State au = m.apply(0.0, u);
    CHECK((as_eigen(au) - oracle).norm() <= 1e-10 * oracle.norm());
    CHECK(au == pme_apply(3.0, u));

    const double inner_oracle = dx * (neg_inv * as_eigen(u)).dot(as_eigen(v));
    CHECK(m.inner_h(u, v) == doctest::Approx(inner_oracle).epsilon(1e-10));
    // Telescoping: <A(u), u>_H = -|u|_{L^{r+1}}^{r+1}.
    CHECK(m.inner_h(au, u) == doctest::Approx(-lp).epsilon(1e-10));
    CHECK(std::pow(m.norm_v(u), 4.0) == doctest::Approx(lp).epsilon(1e-12));
    CHECK(m.dual_norm(au) == doctest::Approx(std::pow(m.norm_v(u), 3.0)).epsilon(1e-10));

    const State e = m.embed_h(u);
    double e2 = 0.0;
    for (double x : e) e2 += x * x;
    CHECK(e2 == doctest::Approx(m.inner_h(u, u)).epsilon(1e-10));
  }
}

TEST_CASE("degenerate exponent gives the heat operator") {
  const std::size_t n = 16;
  const double dx = 1.0 / 17.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_laplacian(n));
  const Eigen::VectorXd vals = solver.eigenvalues();
  const Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(n) - 1);  // least negative
  State s(v.data(), v.data() + n);
  const State lv = porous_medium_flux_laplacian(1.0, s, dx);
  const double rate = -as_eigen(lv).dot(v) / v.squaredNorm();
  PorousMediumModel m(2.0, n);
  CHECK(-vals(static_cast<Eigen::Index>(n) - 1) == doctest::Approx(m.first_eigenvalue()).epsilon(1e-12));
  CHECK(std::abs(rate - m.first_eigenvalue()) <= 1e-8 * m.first_eigenvalue());
  CHECK(m.constants().lambda_embed == doctest::Approx(m.first_eigenvalue()));
}

TEST_CASE("porous medium assumption checks") {
  PorousMediumModel m(3.0, 16);
  const auto samples = sample_states(m, 1000, 11, 1.0, 1.0);
  auto exact = m.constants();
  exact.c_bound = 0.0;
  const auto identity = m.with_constants(exact);
  // Unit-scale states so the absolute tolerance is meaningful.
  CHECK(check_coercivity(*identity, 0.0, sample_states(m, 1000, 12)) >= -1e-10);
  CHECK(check_embedding(m, samples) >= -1e-12);

  std::vector<std::pair<State, State>> pairs;
  for (std::size_t i = 0; i + 1 < samples.size(); i += 2) pairs.emplace_back(samples[i], samples[i + 1]);
  CHECK(check_local_monotonicity(m, 0.0, pairs) >= -1e-10);
  CHECK(check_local_monotonicity(m, 0.0, std::vector<std::pair<State, State>>{{samples[0], samples[0]}}) == 0.0);

  for (const auto& v : samples) {
    const auto er = eta_rho_eval(m, v);
    CHECK(er.eta == 0.0);
    CHECK(er.rho == 0.0);
  }

  // Growth: calibrate once on a large pilot, then validate on fresh states.
  auto growth = m.constants();
  growth.varpi = 0.0;
  const auto uncal = m.with_constants(growth);
  const auto pilot = sample_states(m, 10000, 99, 1.0, 1.0);
  growth.c_bound = calibrate_growth_constant(*uncal, 0.0, pilot);
  CHECK(growth.c_bound > 0.0);
  const auto calibrated = m.with_constants(growth);
  CHECK(check_growth(*calibrated, 0.0, samples) <= 1.0);
  CHECK(check_uniqueness_condition(m, samples) == 0.0);

  std::vector<std::array<State, 3>> triples;
  for (std::size_t i = 0; i + 2 < 60; i += 3) triples.push_back({samples[i], samples[i + 1], samples[i + 2]});
  CHECK(check_hemicontinuity(m, 0.0, triples) >= 0.0);
}

TEST_CASE("porous medium shifted jacobian solve") {
  PorousMediumModel m(2.5, 12);
  std::mt19937_64 rng(4);
  const State u = m.random_state(rng, 1.0);
  const State rhs = m.random_state(rng, 1.0);
  const double dt = 1e-3;
  const State x = m.solve_shifted_jacobian(0.0, u, dt, rhs);
  const double eps = 1e-6;
  State up(u), um(u);
  for (std::size_t i = 0; i < u.size(); ++i) {
    up[i] += eps * x[i];
    um[i] -= eps * x[i];
  }
  const State ap = m.apply(0.0, up), am = m.apply(0.0, um);
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double jx = (ap[i] - am[i]) / (2 * eps);
    err = std::max(err, std::abs(x[i] - dt * jx - rhs[i]));
    scale = std::max(scale, std::abs(rhs[i]));
  }
  CHECK(err <= 1e-6 * scale);
}

TEST_CASE("navier stokes zero state and structure") {
  NavierStokesModel m(1.0, 8);
  CHECK(m.dimension() == 4 * (8 * 17 + 8));
  const State zero(m.dimension(), 0.0);
  CHECK(max_abs(m.apply(0.0, zero)) == 0.0);
  CHECK(max_abs(nse_apply(m, 0.0, zero)) == 0.0);
  const auto er = eta_rho_eval(m, zero);
  CHECK(er.eta == 0.0);
  CHECK(er.rho == 0.0);
  CHECK(m.dealias_grid() > 3 * m.truncation());

  std::mt19937_64 rng(1);
  State bad = m.random_state(rng, 1.0);
  bad[0] += 0.5;  // mode (1, 0): u1 carries a divergence
  CHECK_THROWS_AS(m.apply(0.0, bad), PreconditionError);
  CHECK(m.divergence_defect(m.project(bad)) < 1e-14);
  CHECK_THROWS_AS(NavierStokesModel(0.0, 8), ConfigError);
}

TEST_CASE("navier stokes grid transforms agree with direct summation") {
  NavierStokesModel m(1.0, 4);
  std::mt19937_64 rng(2);
  const State u = m.random_state(rng, 1.0);
  const std::size_t grid = 12;
  const auto [g1, g2] = m.to_grid(u, grid);
  const double h = 2 * kPi / grid;
  for (std::size_t a = 0; a < grid; ++a) {
    for (std::size_t b = 0; b < grid; ++b) {
      const auto p = evaluate(m, u, h * static_cast<double>(a), h * static_cast<double>(b));
      CHECK(g1[a * grid + b] == doctest::Approx(p.u[0]).epsilon(1e-12).scale(1.0));
      CHECK(g2[a * grid + b] == doctest::Approx(p.u[1]).epsilon(1e-12).scale(1.0));
    }
  }
  const State back = m.from_grid(g1, g2, grid);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(back[i] == doctest::Approx(u[i]).scale(1.0).epsilon(1e-13));
}

TEST_CASE("navier stokes bilinear term against a real-space oracle") {
  NavierStokesModel m(1.0, 8);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const State u = m.random_state(rng, 1.0 + trial % 5);
    const State b = m.bilinear(u);
    const double nu = std::sqrt(m.inner_h(u, u));
    // Energy orthogonality.
    CHECK(std::abs(m.inner_h(b, u)) <= 1e-12 * nu * nu * nu);
    // Divergence free output.
    CHECK(m.divergence_defect(b) <= 1e-12 * (1 + max_abs(b)));
    if (trial < 8) {
      const State w = m.random_state(rng, 1.0);
      const double oracle = advection_pairing_oracle(m, u, w, 32);
      CHECK(m.inner_h(b, w) == doctest::Approx(oracle).epsilon(1e-10));
      // Brute-force orthogonality in real space.
      CHECK(std::abs(advection_pairing_oracle(m, u, u, 32)) <= 1e-11 * nu * nu * nu);
    }
  }
}

TEST_CASE("taylor green vortex has a gradient nonlinearity") {
  NavierStokesModel m(1.0, 8);
  const State u = field_from_functions(
      m, [](double x, double y) { return std::sin(x) * std::cos(y); },
      [](double x, double y) { return -std::cos(x) * std::sin(y); }, 32);
  CHECK(max_abs(u) == doctest::Approx(0.25));
  CHECK(max_abs(m.bilinear(u)) <= 1e-12);
  // The Stokes part decays it at rate 2 nu.
  const State a = m.apply(0.0, u);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(a[i] == doctest::Approx(-2.0 * u[i]).scale(1.0).epsilon(1e-12));
}

TEST_CASE("navier stokes rho is the L4 norm to the fourth") {
  NavierStokesModel m(1.0, 8);
  const State u = field_from_functions(
      m, [](double x, double y) { return std::sin(x) * std::sin(y); },
      [](double x, double y) { return std::cos(x) * std::cos(y); }, 32);
  CHECK(m.divergence_defect(u) < 1e-15);
  const std::size_t grid = 64;
  const double h = 2 * kPi / grid;
  double quad = 0.0;
  for (std::size_t a = 0; a < grid; ++a) {
    for (std::size_t b = 0; b < grid; ++b) {
      const double x = h * static_cast<double>(a), y = h * static_cast<double>(b);
      const double s = std::pow(std::sin(x) * std::sin(y), 2) + std::pow(std::cos(x) * std::cos(y), 2);
      quad += s * s * h * h;
    }
  }
  CHECK(std::abs(m.rho(u) - quad) <= 1e-10 * quad);
  CHECK(eta_rho_eval(m, u).rho == doctest::Approx(quad).epsilon(1e-10));
  // |u|^2 integrates to 4 pi^2 / 2.
  CHECK(m.inner_h(u, u) == doctest::Approx(2 * kPi * kPi).epsilon(1e-12));
}

TEST_CASE("navier stokes assumption checks") {
  nlohmann::json block = {{"type", "nse"},
                          {"nu", 1.0},
                          {"truncation", 8},
                          {"forcing", {{"mode", 2}, {"amplitude", 1.5}}}};
  const auto model = make_model(block);
  const auto& m = dynamic_cast<const NavierStokesModel&>(*model);
  CHECK_FALSE(m.autonomous());
  const State h = m.forcing_at(0.0);
  CHECK(m.divergence_defect(h) == 0.0);
  CHECK(m.inner_h(h, h) == doctest::Approx(1.5 * 1.5 * 2 * kPi * kPi));
  CHECK(m.forcing_level(0.0) == doctest::Approx(m.forcing_constant() * m.inner_h(h, h)));
  CHECK(m.constants().alpha == 2.0);
  CHECK(m.constants().gamma_coercive == 0.5);
  CHECK(m.constants().varpi == 2.0);

  const auto samples = sample_states(m, 1000, 21, 1.0, 1.0);
  CHECK(check_coercivity(m, 0.0, samples) >= 0.0);
  CHECK(check_coercivity(m, 1.7, samples) >= 0.0);
  CHECK(check_embedding(m, samples) >= -1e-12);

  const auto pilot = sample_states(m, 1000, 77, 1.0, 1.0);
  auto c = m.constants();
  const auto cal = m.with_constants(c);
  (void)cal;
  c.c_bound = std::max(c.c_bound, calibrate_growth_constant(m, 0.0, pilot));
  NavierStokesModel calibrated(m.viscosity(), m.truncation(),
                               VelocityForcing{h, ScalarForcing::constant(1.0)}, c);
  CHECK(check_growth(calibrated, 0.0, samples) <= 1.0);
  CHECK(check_uniqueness_condition(m, samples) <= 1.0);

  std::vector<std::pair<State, State>> pairs;
  for (std::size_t i = 0; i + 1 < 400; i += 2) pairs.emplace_back(samples[i], samples[i + 1]);
  CHECK(check_local_monotonicity(m, 0.0, pairs) >= 0.0);

  std::vector<std::array<State, 3>> triples;
  for (std::size_t i = 0; i + 2 < 30; i += 3) triples.push_back({samples[i], samples[i + 1], samples[i + 2]});
  CHECK(check_hemicontinuity(m, 0.0, triples) >= 0.0);

  for (const auto& v : samples) {
    const auto e = m.embed_h(v);
    double s = 0.0;
    for (double x : e) s += x * x;
    CHECK(s == doctest::Approx(m.inner_h(v, v)).epsilon(1e-12));
  }
}

TEST_CASE("scalar forcing and integrability certificates") {
  const auto c = ScalarForcing::constant(2.0);
  CHECK(c(-5.0) == 2.0);
  const auto e = ScalarForcing::exp_decay(3.0, 0.5);
  CHECK(e(-2.0) == doctest::Approx(3.0 * std::exp(-1.0)));
  const auto p = ScalarForcing::periodic(1.0, 0.5, 2.0);
  CHECK(p(0.25) == doctest::Approx(1.0 + 0.5 * std::sin(0.5)));
  CHECK(ScalarForcing::from_json(p.to_json())(1.3) == p(1.3));
  CHECK(ScalarForcing::zero()(1.0) == 0.0);
  CHECK_THROWS_AS(ScalarForcing::from_json({{"kind", "chirp"}}), ConfigError);

  const std::vector<double> etas{0.1, 1.0};
  const auto ok = certify_exponential_integrability(e, 0.0, etas, 200.0);
  CHECK(ok.certified);
  // int_{-inf}^0 3 e^{r/2} e^{r} dr = 2.
  CHECK(ok.integrals[1] == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(certify_exponential_integrability(c, 0.0, etas, 200.0).certified);
  const auto grow = [](double r) { return std::exp(2.0 * std::abs(r)); };
  CHECK_FALSE(certify_exponential_integrability(grow, 0.0, etas, 50.0).certified);
  CHECK_THROWS_AS(certify_exponential_integrability(c, 0.0, std::vector<double>{0.0}, 10.0), DomainError);
}

TEST_CASE("model factory") {
  CHECK(make_model({{"type", "linear"}, {"a", 2.0}, {"g", 1.0}})->id() == "linear");
  CHECK(make_model({{"type", "pme"}, {"r", 3.0}, {"nodes", 10}})->dimension() == 10);
  CHECK(make_model({{"type", "pme"}, {"C", 5.0}})->constants().c_bound == 5.0);
  CHECK(make_model({{"type", "nse"}, {"truncation", 4}})->autonomous());
  CHECK_THROWS_AS(make_model({{"type", "heat"}}), ConfigError);
  CHECK_THROWS_AS(make_model({{"type", "linear"}, {"b", 1.0}}), ConfigError);
  CHECK_THROWS_AS(make_model({{"type", "linear"}, {"a", -1.0}}), ConfigError);
  CHECK_THROWS_AS(make_model({{"type", "pme"}, {"r", 1.0}}), ConfigError);
  CHECK_THROWS_AS(make_model({{"type", "pme"}, {"r", "x"}}), ConfigError);
  CHECK_THROWS_AS(make_model({{"type", "nse"}, {"forcing", {{"mode", 9}}}, {"truncation", 4}}), ConfigError);
  const auto d = make_model({{"type", "pme"}, {"r", 2.0}, {"nodes", 6}})->describe();
  CHECK(d.at("type") == "pme");
}

TEST_CASE("sampling is deterministic") {
  PorousMediumModel m(2.0, 8);
  CHECK(sample_states(m, 5, 3) == sample_states(m, 5, 3));
  CHECK(sample_states(m, 5, 3) != sample_states(m, 5, 4));
}
