#include <cmath>
#include <numbers>

#include "fbmlab/error.hpp"
#include "fbmlab/kernels.hpp"
#include "fbmlab/models.hpp"

namespace fbmlab {

namespace {

double signed_power(double u, double r) { return std::copysign(std::pow(std::abs(u), r), u); }

// Thomas algorithm for a tridiagonal system; sub[0] and super[n-1] are unused.
State thomas(std::vector<double> sub, std::vector<double> diag, std::vector<double> super, State rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    double m = sub[i] / diag[i - 1];
    diag[i] -= m * super[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - super[i] * rhs[i + 1]) / diag[i];
  return rhs;
}

}  // namespace

State porous_medium_flux_laplacian(double r, std::span<const double> u, double dx) {
  if (!(r >= 1.0)) throw DomainError("porous medium exponent must be >= 1");
  if (u.empty()) throw DomainError("porous medium state is empty");
  const std::size_t n = u.size();
  State phi(n);
  for (std::size_t i = 0; i < n; ++i) phi[i] = r == 1.0 ? u[i] : signed_power(u[i], r);
  State out(n);
  const double inv = 1.0 / (dx * dx);
  for (std::size_t i = 0; i < n; ++i) {
    double left = i > 0 ? phi[i - 1] : 0.0;
    double right = i + 1 < n ? phi[i + 1] : 0.0;
    out[i] = (left - 2.0 * phi[i] + right) * inv;
  }
  return out;
}

State pme_apply(double r, std::span<const double> u) {
  if (!(r > 1.0)) throw DomainError("porous medium exponent must exceed 1");
  return porous_medium_flux_laplacian(r, u, 1.0 / static_cast<double>(u.size() + 1));
}

TripleConstants PorousMediumModel::default_constants(double r, std::size_t nodes) {
  // <A(u), u>_H = -|u|_V^{r+1} exactly, and |A(u)|_{V*}^{(r+1)/r} = |u|_V^{r+1},
  // so coercivity holds with gamma = 2, K = C = 0 and growth with C = 1.
  TripleConstants c;
  double dx = 1.0 / static_cast<double>(nodes + 1);
  double s = std::sin(std::numbers::pi * dx / 2.0);
  c.lambda_embed = 4.0 * s * s / (dx * dx);
  c.alpha = r + 1.0;
  c.gamma_coercive = 2.0;
  c.k_coercive = 0.0;
  c.c_bound = 2.0;
  c.c_monotone = 0.0;
  return c;
}

PorousMediumModel::PorousMediumModel(double r, std::size_t nodes)
    : PorousMediumModel(r, nodes, default_constants(r, nodes)) {}

PorousMediumModel::PorousMediumModel(double r, std::size_t nodes, TripleConstants constants)
    : GelfandModel(constants), r_(r), nodes_(nodes), dx_(1.0 / static_cast<double>(nodes + 1)) {
  if (!(r > 1.0) || !std::isfinite(r)) throw ConfigError("porous medium exponent must exceed 1");
  if (nodes < 2) throw ConfigError("porous medium grid needs at least 2 interior nodes");
  const double n1 = static_cast<double>(nodes + 1);
  embedding_.resize(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(nodes));
  for (std::size_t k = 1; k <= nodes; ++k) {
    double s = std::sin(std::numbers::pi * static_cast<double>(k) * dx_ / 2.0);
    double mu = 4.0 * s * s / (dx_ * dx_);
    double w = std::sqrt(dx_ / mu) * std::sqrt(2.0 / n1);
    for (std::size_t i = 1; i <= nodes; ++i) {
      embedding_(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(i - 1)) =
          w * std::sin(std::numbers::pi * static_cast<double>(k * i) / n1);
    }
  }
}

std::unique_ptr<GelfandModel> PorousMediumModel::with_constants(const TripleConstants& constants) const {
  return std::make_unique<PorousMediumModel>(r_, nodes_, constants);
}

double PorousMediumModel::first_eigenvalue() const {
  double s = std::sin(std::numbers::pi * dx_ / 2.0);
  return 4.0 * s * s / (dx_ * dx_);
}

State PorousMediumModel::apply(double, std::span<const double> u) const {
  validate_state(u);
  return porous_medium_flux_laplacian(r_, u, dx_);
}

State PorousMediumModel::inverse_neg_laplacian(std::span<const double> f) const {
  const double inv = 1.0 / (dx_ * dx_);
  return thomas(std::vector<double>(nodes_, -inv), std::vector<double>(nodes_, 2.0 * inv),
                std::vector<double>(nodes_, -inv), State(f.begin(), f.end()));
}

double PorousMediumModel::inner_h(std::span<const double> a, std::span<const double> b) const {
  State w = inverse_neg_laplacian(a);
  return dx_ * kernels::dot(w, b);
}

double PorousMediumModel::norm_v(std::span<const double> u) const {
  double s = 0.0;
  for (double v : u) s += std::pow(std::abs(v), r_ + 1.0);
  return std::pow(s * dx_, 1.0 / (r_ + 1.0));
}

double PorousMediumModel::pairing(std::span<const double> f, std::span<const double> v) const {
  return inner_h(f, v);
}

double PorousMediumModel::dual_norm(std::span<const double> f) const {
  State w = inverse_neg_laplacian(f);
  const double q = (r_ + 1.0) / r_;
  double s = 0.0;
  for (double v : w) s += std::pow(std::abs(v), q);
  return std::pow(s * dx_, 1.0 / q);
}

State PorousMediumModel::embed_h(std::span<const double> u) const {
  Eigen::Map<const Eigen::VectorXd> x(u.data(), static_cast<Eigen::Index>(u.size()));
  Eigen::VectorXd y = embedding_ * x;
  return State(y.data(), y.data() + y.size());
}

State PorousMediumModel::random_state(std::mt19937_64& rng, double scale) const {
  std::normal_distribution<double> normal;
  State u(nodes_, 0.0);
  const double n1 = static_cast<double>(nodes_ + 1);
  for (std::size_t k = 1; k <= nodes_; ++k) {
    double c = scale * normal(rng) / static_cast<double>(k * k);
    for (std::size_t i = 1; i <= nodes_; ++i) u[i - 1] += c * std::sin(std::numbers::pi * static_cast<double>(k * i) / n1);
  }
  return u;
}

State PorousMediumModel::solve_diffusion(double dt, std::span<const double> d, std::span<const double> rhs) const {
  const double c = dt / (dx_ * dx_);
  std::vector<double> sub(nodes_), diag(nodes_), super(nodes_);
  for (std::size_t i = 0; i < nodes_; ++i) {
    sub[i] = i > 0 ? -c * d[i - 1] : 0.0;
    diag[i] = 1.0 + 2.0 * c * d[i];
    super[i] = i + 1 < nodes_ ? -c * d[i + 1] : 0.0;
  }
  return thomas(std::move(sub), std::move(diag), std::move(super), State(rhs.begin(), rhs.end()));
}

State PorousMediumModel::imex_step(double, double dt, double z, std::span<const double> v) const {
  // Lagged diffusivity: z L(|u|^{r-1} u) with u = v/z equals L(D(u) v).
  State d(nodes_);
  for (std::size_t i = 0; i < nodes_; ++i) d[i] = std::pow(std::abs(v[i] / z), r_ - 1.0);
  return solve_diffusion(dt, d, v);
}

State PorousMediumModel::solve_shifted_jacobian(double, std::span<const double> u, double dt,
                                                std::span<const double> rhs) const {
  State d(nodes_);
  for (std::size_t i = 0; i < nodes_; ++i) d[i] = r_ * std::pow(std::abs(u[i]), r_ - 1.0);
  return solve_diffusion(dt, d, rhs);
}

nlohmann::json PorousMediumModel::describe() const {
  return {{"type", "pme"}, {"r", r_}, {"nodes", nodes_}, {"dx", dx_}, {"constants", to_json(constants_)}};
}

}  // namespace fbmlab
