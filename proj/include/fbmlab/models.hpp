#pragma once

// Discretized Gelfand-triple models V ⊂ H ⊂ V*. States are coefficient
// vectors in each model's discrete H basis; every norm and pairing is
// mesh-consistent, so the continuous identities hold in discrete form.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fbmlab/fft.hpp"

namespace fbmlab {

using State = std::vector<double>;

/// Constants of the coercivity/growth/monotonicity conditions.
struct TripleConstants {
  double lambda_embed = 1.0;    // lambda |v|_H^2 <= |v|_V^2
  double alpha = 2.0;           // coercivity exponent
  double gamma_coercive = 1.0;  // gamma (or c)
  double k_coercive = 0.0;      // K (or the constant g)
  double c_bound = 0.0;         // C in coercivity and growth
  double c_monotone = 0.0;      // C in local monotonicity
  double varpi = 0.0;           // growth exponent on |v|_H
  double vartheta = 0.0;        // exponent in the uniqueness condition

  /// ConfigError unless alpha >= 2, gamma > 0, lambda > 0, nonnegative
  /// constants, and K < gamma*lambda when alpha == 2.
  void validate() const;
};

nlohmann::json to_json(const TripleConstants& c);

/// Scalar time envelope f(t) with a closed form.
class ScalarForcing {
 public:
  enum class Kind { zero, constant, exp_decay, periodic };

  static ScalarForcing zero();
  static ScalarForcing constant(double value);
  /// amplitude * e^{-rate |t|}
  static ScalarForcing exp_decay(double amplitude, double rate);
  /// offset + amplitude * sin(frequency t)
  static ScalarForcing periodic(double offset, double amplitude, double frequency);
  static ScalarForcing from_json(const nlohmann::json& j);

  double operator()(double t) const;
  Kind kind() const { return kind_; }
  nlohmann::json to_json() const;

 private:
  ScalarForcing(Kind kind, double a, double b, double c) : kind_(kind), a_(a), b_(b), c_(c) {}
  Kind kind_;
  double a_, b_, c_;
};

struct IntegrabilityCertificate {
  bool certified;
  std::vector<double> etas;
  std::vector<double> integrals;  // int_{t-horizon}^{t} |f(r)| e^{eta r} dr
  std::vector<double> tail_ratio; // integrand at t - horizon over its window maximum
};

/// Numerical certificate that int_{-inf}^t |f(r)| e^{eta r} dr < inf for each
/// eta: the integrand must decay below 1e-6 of its window maximum at the far
/// end of the window. Every eta must be positive.
IntegrabilityCertificate certify_exponential_integrability(const std::function<double(double)>& f, double t,
                                                           std::span<const double> etas, double horizon,
                                                           double step = 1.0 / 64.0);

/// Abstract discretized operator A: V -> V* together with its triple.
class GelfandModel {
 public:
  explicit GelfandModel(TripleConstants constants);
  virtual ~GelfandModel() = default;

  virtual std::string_view id() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual bool autonomous() const { return true; }
  virtual std::unique_ptr<GelfandModel> with_constants(const TripleConstants& constants) const = 0;

  const TripleConstants& constants() const { return constants_; }

  /// A(t, u) as a dual-space representative.
  virtual State apply(double t, std::span<const double> u) const = 0;
  virtual double inner_h(std::span<const double> a, std::span<const double> b) const = 0;
  double norm_h(std::span<const double> u) const;
  virtual double norm_v(std::span<const double> u) const = 0;
  /// <F, v> between V* and V representatives.
  virtual double pairing(std::span<const double> f, std::span<const double> v) const = 0;
  virtual double dual_norm(std::span<const double> f) const = 0;
  virtual double eta(std::span<const double>) const { return 0.0; }
  virtual double rho(std::span<const double>) const { return 0.0; }

  /// C in coercivity/growth, or f(t) for nonautonomous models.
  virtual double forcing_level(double t) const;
  /// C in local monotonicity, or f(t) for nonautonomous models.
  virtual double monotone_level(double t) const;

  /// Linear isometry into Euclidean space: |embed_h(u)|_2 == |u|_H.
  virtual State embed_h(std::span<const double> u) const = 0;
  /// Gaussian coefficients with spectral decay |k|^{-2}, times `scale`.
  virtual State random_state(std::mt19937_64& rng, double scale) const = 0;
  /// Dimension and finiteness; models add their own structural checks.
  virtual void validate_state(std::span<const double> u) const;

  /// One IMEX step of the transformed equation v' = z A(t, v/z): stiff part
  /// implicit, the rest explicit at (t, z).
  virtual State imex_step(double t, double dt, double z, std::span<const double> v) const = 0;
  virtual bool has_jacobian() const { return false; }
  /// Solves (I - dt A'(t, u)) x = rhs; ConfigError when the model has no Jacobian.
  virtual State solve_shifted_jacobian(double t, std::span<const double> u, double dt,
                                       std::span<const double> rhs) const;

  virtual nlohmann::json describe() const = 0;

 protected:
  TripleConstants constants_;
};

using ModelPtr = std::shared_ptr<const GelfandModel>;

/// Scalar test model A(u) = -a u + g on H = V = R.
class LinearModel final : public GelfandModel {
 public:
  LinearModel(double a, double g);
  LinearModel(double a, double g, TripleConstants constants);

  std::string_view id() const override { return "linear"; }
  std::size_t dimension() const override { return 1; }
  std::unique_ptr<GelfandModel> with_constants(const TripleConstants& constants) const override;

  double rate() const { return a_; }
  double source() const { return g_; }

  State apply(double t, std::span<const double> u) const override;
  double inner_h(std::span<const double> a, std::span<const double> b) const override;
  double norm_v(std::span<const double> u) const override;
  double pairing(std::span<const double> f, std::span<const double> v) const override;
  double dual_norm(std::span<const double> f) const override;
  State embed_h(std::span<const double> u) const override;
  State random_state(std::mt19937_64& rng, double scale) const override;
  State imex_step(double t, double dt, double z, std::span<const double> v) const override;
  bool has_jacobian() const override { return true; }
  State solve_shifted_jacobian(double t, std::span<const double> u, double dt,
                               std::span<const double> rhs) const override;
  nlohmann::json describe() const override;

  static TripleConstants default_constants(double a, double g);

 private:
  double a_;
  double g_;
};

/// -a u + g for a one-dimensional state.
State linear_apply(double a, double g, std::span<const double> u);

/// Porous medium operator u -> L(|u|^{r-1} u) on n interior nodes of (0, 1)
/// with homogeneous Dirichlet data, H = discrete W^{-1,2}, V = discrete L^{r+1}.
class PorousMediumModel final : public GelfandModel {
 public:
  PorousMediumModel(double r, std::size_t nodes);
  PorousMediumModel(double r, std::size_t nodes, TripleConstants constants);

  std::string_view id() const override { return "pme"; }
  std::size_t dimension() const override { return nodes_; }
  std::unique_ptr<GelfandModel> with_constants(const TripleConstants& constants) const override;

  double exponent() const { return r_; }
  double spacing() const { return dx_; }
  /// Smallest eigenvalue of the discrete Dirichlet -Laplacian.
  double first_eigenvalue() const;

  State apply(double t, std::span<const double> u) const override;
  double inner_h(std::span<const double> a, std::span<const double> b) const override;
  double norm_v(std::span<const double> u) const override;
  double pairing(std::span<const double> f, std::span<const double> v) const override;
  double dual_norm(std::span<const double> f) const override;
  State embed_h(std::span<const double> u) const override;
  State random_state(std::mt19937_64& rng, double scale) const override;
  State imex_step(double t, double dt, double z, std::span<const double> v) const override;
  bool has_jacobian() const override { return true; }
  State solve_shifted_jacobian(double t, std::span<const double> u, double dt,
                               std::span<const double> rhs) const override;
  nlohmann::json describe() const override;

  /// (-L)^{-1} f via the tridiagonal solve.
  State inverse_neg_laplacian(std::span<const double> f) const;

  static TripleConstants default_constants(double r, std::size_t nodes);

 private:
  State solve_diffusion(double dt, std::span<const double> diffusivity, std::span<const double> rhs) const;

  double r_;
  std::size_t nodes_;
  double dx_;
  Eigen::MatrixXd embedding_;  // rows: sqrt(dx / mu_k) * s_k
};

/// L(|u|^{r-1} u) with grid spacing dx; accepts r >= 1 (r = 1 is the heat operator).
State porous_medium_flux_laplacian(double r, std::span<const double> u, double dx);

/// Porous medium operator on the unit interval with dx = 1/(n+1); r must exceed 1.
State pme_apply(double r, std::span<const double> u);

/// Divergence-free body force h(t, x) = envelope(t) * shape(x).
struct VelocityForcing {
  State shape;
  ScalarForcing envelope = ScalarForcing::zero();
};

/// 2-D incompressible Navier-Stokes on the torus [0, 2pi]^2, Fourier-Galerkin
/// with square truncation |k_1|, |k_2| <= N and 2/3-rule dealiasing.
/// A(t, u) = nu Delta u + B(u, u) + h(t), B(u, v) = -P[(u . grad) v].
///
/// Coefficient layout: for each stored mode k (k_2 > 0, or k_2 == 0 and
/// k_1 > 0) four reals Re u1, Im u1, Re u2, Im u2; the remaining modes follow
/// from Hermitian symmetry.
class NavierStokesModel final : public GelfandModel {
 public:
  NavierStokesModel(double nu, std::size_t truncation, std::optional<VelocityForcing> forcing = std::nullopt);
  NavierStokesModel(double nu, std::size_t truncation, std::optional<VelocityForcing> forcing,
                    TripleConstants constants);

  std::string_view id() const override { return "nse"; }
  std::size_t dimension() const override { return 4 * modes_.size(); }
  bool autonomous() const override { return !forcing_.has_value(); }
  std::unique_ptr<GelfandModel> with_constants(const TripleConstants& constants) const override;

  double viscosity() const { return nu_; }
  std::size_t truncation() const { return n_; }
  std::size_t dealias_grid() const { return fft_->grid(); }
  const std::vector<std::pair<int, int>>& modes() const { return modes_; }
  /// Constant in f(t) = C_f |h(t)|_H^2.
  double forcing_constant() const;

  State apply(double t, std::span<const double> u) const override;
  /// B(u, u) alone, Leray-projected and truncated.
  State bilinear(std::span<const double> u) const;
  State forcing_at(double t) const;

  double inner_h(std::span<const double> a, std::span<const double> b) const override;
  double norm_v(std::span<const double> u) const override;
  double pairing(std::span<const double> f, std::span<const double> v) const override;
  double dual_norm(std::span<const double> f) const override;
  double rho(std::span<const double> u) const override;
  double forcing_level(double t) const override;
  double monotone_level(double t) const override;
  State embed_h(std::span<const double> u) const override;
  State random_state(std::mt19937_64& rng, double scale) const override;
  void validate_state(std::span<const double> u) const override;
  State imex_step(double t, double dt, double z, std::span<const double> v) const override;
  nlohmann::json describe() const override;

  /// Leray projection of an arbitrary coefficient vector.
  State project(std::span<const double> u) const;
  /// Largest |k . u_k| / |k| over the stored modes.
  double divergence_defect(std::span<const double> u) const;
  /// Velocity on an m x m grid (m even, m > 2N), x_j = 2 pi j / m.
  std::pair<std::vector<double>, std::vector<double>> to_grid(std::span<const double> u, std::size_t m) const;
  /// Fourier coefficients of grid data on an m x m grid, truncated to the stored modes.
  State from_grid(std::span<const double> u1, std::span<const double> u2, std::size_t m) const;

  static TripleConstants default_constants(double nu);

 private:
  void fill_spectrum(std::span<const double> u, std::size_t component, int deriv_axis,
                     std::span<std::complex<double>> spec, std::size_t m) const;

  double nu_;
  std::size_t n_;
  std::optional<VelocityForcing> forcing_;
  std::vector<std::pair<int, int>> modes_;
  std::shared_ptr<const fft::Real2d> fft_;       // dealiasing grid, > 3N
  std::shared_ptr<const fft::Real2d> fft_quad_;  // quartic quadrature grid, > 4N
};

/// nu Delta u + B(u, u) + h(t) for a spectral state of `model`'s truncation.
State nse_apply(const NavierStokesModel& model, double t, std::span<const double> u);

/// Builds a model from its configuration block {type: linear|pme|nse, ...}.
ModelPtr make_model(const nlohmann::json& block);

// ---- assumption checkers -------------------------------------------------

/// Draws `count` states from the model's sampler with a fixed seed. When
/// `log_scale_spread` > 0 each state's scale is multiplied by
/// 10^{U(-spread, spread)}.
std::vector<State> sample_states(const GelfandModel& model, std::size_t count, std::uint64_t seed,
                                 double scale = 1.0, double log_scale_spread = 0.0);

/// min over samples of -gamma|v|_V^alpha + K|v|_H^2 + C(t) - 2<A(t,v), v>.
double check_coercivity(const GelfandModel& model, double t, std::span<const State> samples);

/// max over samples of |A(t,v)|_{V*}^{alpha/(alpha-1)} / [C (f(t) or 1 + |v|_V^alpha)(1 + |v|_H^varpi)].
double check_growth(const GelfandModel& model, double t, std::span<const State> samples);

/// min over pairs of (C(t) + eta(v1) + rho(v2)) |v1-v2|_H^2 - 2<A(t,v1) - A(t,v2), v1 - v2>.
double check_local_monotonicity(const GelfandModel& model, double t,
                                std::span<const std::pair<State, State>> pairs);

/// Continuity proxy for s -> <A(t, v1 + s v2), v>: worst jump over a step of
/// 2^-20 in s, sampled on s in [-1, 1]. Returns 1e-4 (1 + scale) - jump.
double check_hemicontinuity(const GelfandModel& model, double t,
                            std::span<const std::array<State, 3>> triples);

/// max over samples of (eta(v) + rho(v)) / [C (1 + |v|_V^alpha)(1 + |v|_H^vartheta)].
double check_uniqueness_condition(const GelfandModel& model, std::span<const State> samples);

/// min over samples of |v|_V^2 - lambda |v|_H^2.
double check_embedding(const GelfandModel& model, std::span<const State> samples);

struct EtaRho {
  double eta;
  double rho;
};
EtaRho eta_rho_eval(const GelfandModel& model, std::span<const double> v);

/// Growth constant making check_growth <= 1/safety on the pilot sample.
double calibrate_growth_constant(const GelfandModel& model, double t, std::span<const State> pilot,
                                 double safety = 2.0);

/// Uniqueness constant making check_uniqueness_condition <= 1/safety on the pilot.
double calibrate_uniqueness_constant(const GelfandModel& model, std::span<const State> pilot,
                                     double safety = 2.0);

}  // namespace fbmlab
