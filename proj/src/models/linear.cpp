#include <algorithm>
#include <cmath>

#include "fbmlab/error.hpp"
#include "fbmlab/models.hpp"

namespace fbmlab {

State linear_apply(double a, double g, std::span<const double> u) {
  if (u.size() != 1) throw DomainError("linear model state must be one-dimensional");
  return {-a * u[0] + g};
}

TripleConstants LinearModel::default_constants(double a, double g) {
  // (a u - g)^2 <= 2a^2 u^2 + 2g^2, and -2(-a u + g)u <= -a u^2 + g^2/a.
  TripleConstants c;
  c.lambda_embed = 1.0;
  c.alpha = 2.0;
  c.gamma_coercive = a;
  c.k_coercive = 0.0;
  c.c_bound = std::max({g * g / a, 2.0 * a * a, 2.0 * g * g});
  c.c_monotone = 0.0;
  return c;
}

LinearModel::LinearModel(double a, double g) : LinearModel(a, g, default_constants(a, g)) {}

LinearModel::LinearModel(double a, double g, TripleConstants constants)
    : GelfandModel(constants), a_(a), g_(g) {
  if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(g)) throw ConfigError("linear model requires a > 0, finite g");
}

std::unique_ptr<GelfandModel> LinearModel::with_constants(const TripleConstants& constants) const {
  return std::make_unique<LinearModel>(a_, g_, constants);
}

State LinearModel::apply(double, std::span<const double> u) const { return linear_apply(a_, g_, u); }
double LinearModel::inner_h(std::span<const double> a, std::span<const double> b) const { return a[0] * b[0]; }
double LinearModel::norm_v(std::span<const double> u) const { return std::abs(u[0]); }
double LinearModel::pairing(std::span<const double> f, std::span<const double> v) const { return f[0] * v[0]; }
double LinearModel::dual_norm(std::span<const double> f) const { return std::abs(f[0]); }
State LinearModel::embed_h(std::span<const double> u) const { return {u[0]}; }

State LinearModel::random_state(std::mt19937_64& rng, double scale) const {
  std::normal_distribution<double> normal;
  return {scale * normal(rng)};
}

State LinearModel::imex_step(double, double dt, double z, std::span<const double> v) const {
  return {(v[0] + dt * g_ * z) / (1.0 + a_ * dt)};
}

State LinearModel::solve_shifted_jacobian(double, std::span<const double>, double dt,
                                          std::span<const double> rhs) const {
  return {rhs[0] / (1.0 + a_ * dt)};
}

nlohmann::json LinearModel::describe() const {
  return {{"type", "linear"}, {"a", a_}, {"g", g_}, {"constants", to_json(constants_)}};
}

}  // namespace fbmlab
