#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "fbmlab/error.hpp"
#include "fbmlab/kernels.hpp"
#include "fbmlab/models.hpp"

namespace fbmlab {

namespace {

constexpr double kMass = 8.0 * std::numbers::pi * std::numbers::pi;  // 2 (2 pi)^2

std::size_t wrap(int k, std::size_t m) {
  return k >= 0 ? static_cast<std::size_t>(k) : m - static_cast<std::size_t>(-k);
}

}  // namespace

TripleConstants NavierStokesModel::default_constants(double nu) {
  TripleConstants c;
  c.lambda_embed = 1.0;
  c.alpha = 2.0;
  c.gamma_coercive = nu / 2.0;
  c.k_coercive = 0.0;
  c.c_bound = std::max({3.0 * nu * nu, 3.0, 4.5 * nu});
  c.c_monotone = 0.0;
  c.varpi = 2.0;
  c.vartheta = 2.0;
  return c;
}

NavierStokesModel::NavierStokesModel(double nu, std::size_t truncation, std::optional<VelocityForcing> forcing)
    : NavierStokesModel(nu, truncation, std::move(forcing), default_constants(nu)) {}

NavierStokesModel::NavierStokesModel(double nu, std::size_t truncation, std::optional<VelocityForcing> forcing,
                                     TripleConstants constants)
    : GelfandModel(constants), nu_(nu), n_(truncation), forcing_(std::move(forcing)) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("viscosity must be positive");
  if (truncation < 1 || truncation > 256) throw ConfigError("truncation must lie in [1, 256]");
  const int n = static_cast<int>(truncation);
  for (int k2 = 0; k2 <= n; ++k2) {
    for (int k1 = -n; k1 <= n; ++k1) {
      if (k2 > 0 || k1 > 0) modes_.emplace_back(k1, k2);
    }
  }
  fft_ = std::make_shared<fft::Real2d>(std::bit_ceil(3 * truncation + 1));
  fft_quad_ = std::make_shared<fft::Real2d>(std::bit_ceil(4 * truncation + 1));
  if (forcing_) {
    if (forcing_->shape.size() != dimension()) throw ConfigError("forcing shape has the wrong dimension");
    if (divergence_defect(forcing_->shape) > 1e-12) throw ConfigError("forcing shape is not divergence free");
  }
}

std::unique_ptr<GelfandModel> NavierStokesModel::with_constants(const TripleConstants& constants) const {
  return std::make_unique<NavierStokesModel>(nu_, n_, forcing_, constants);
}

double NavierStokesModel::forcing_constant() const { return 2.0 / (3.0 * nu_ * constants_.lambda_embed); }

void NavierStokesModel::fill_spectrum(std::span<const double> u, std::size_t component, int deriv_axis,
                                      std::span<std::complex<double>> spec, std::size_t m) const {
  std::fill(spec.begin(), spec.end(), std::complex<double>{});
  const std::size_t cols = m / 2 + 1;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    auto [k1, k2] = modes_[i];
    std::complex<double> c(u[4 * i + 2 * component], u[4 * i + 2 * component + 1]);
    if (deriv_axis == 0) c *= std::complex<double>(0.0, k1);
    if (deriv_axis == 1) c *= std::complex<double>(0.0, k2);
    spec[wrap(k1, m) * cols + static_cast<std::size_t>(k2)] = c;
    if (k2 == 0) spec[wrap(-k1, m) * cols] = std::conj(c);
  }
}

State NavierStokesModel::bilinear(std::span<const double> u) const {
  const std::size_t m = fft_->grid();
  const std::size_t cells = m * m;
  std::vector<std::complex<double>> spec(fft_->spectral_size());
  std::array<std::vector<double>, 6> f;  // u1, u2, d1u1, d2u1, d1u2, d2u2
  const std::array<std::pair<std::size_t, int>, 6> plan{{{0, -1}, {1, -1}, {0, 0}, {0, 1}, {1, 0}, {1, 1}}};
  for (std::size_t j = 0; j < 6; ++j) {
    f[j].resize(cells);
    fill_spectrum(u, plan[j].first, plan[j].second, spec, m);
    fft_->backward(spec, f[j]);
  }
  std::vector<double> g(cells);
  State out(dimension(), 0.0);
  const std::size_t cols = m / 2 + 1;
  const double norm = 1.0 / static_cast<double>(cells);
  std::vector<std::complex<double>> g1(modes_.size()), g2(modes_.size());
  for (std::size_t comp = 0; comp < 2; ++comp) {
    // (u . grad) u_comp
    kernels::mul_add_pairs(f[0], f[comp == 0 ? 2 : 4], f[1], f[comp == 0 ? 3 : 5], g);
    fft_->forward(g, spec);
    auto& dst = comp == 0 ? g1 : g2;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      auto [k1, k2] = modes_[i];
      dst[i] = spec[wrap(k1, m) * cols + static_cast<std::size_t>(k2)] * norm;
    }
  }
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    auto [k1, k2] = modes_[i];
    const double kk = static_cast<double>(k1 * k1 + k2 * k2);
    std::complex<double> kg = (static_cast<double>(k1) * g1[i] + static_cast<double>(k2) * g2[i]) / kk;
    std::complex<double> p1 = g1[i] - static_cast<double>(k1) * kg;
    std::complex<double> p2 = g2[i] - static_cast<double>(k2) * kg;
    out[4 * i] = -p1.real();
    out[4 * i + 1] = -p1.imag();
    out[4 * i + 2] = -p2.real();
    out[4 * i + 3] = -p2.imag();
  }
  return out;
}

State NavierStokesModel::forcing_at(double t) const {
  State h(dimension(), 0.0);
  if (forcing_) kernels::scale_into(forcing_->envelope(t), forcing_->shape, h);
  return h;
}

State NavierStokesModel::apply(double t, std::span<const double> u) const {
  validate_state(u);
  State out = bilinear(u);
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    auto [k1, k2] = modes_[i];
    const double damp = -nu_ * static_cast<double>(k1 * k1 + k2 * k2);
    for (std::size_t c = 0; c < 4; ++c) out[4 * i + c] += damp * u[4 * i + c];
  }
  if (forcing_) kernels::axpy(forcing_->envelope(t), forcing_->shape, out);
  return out;
}

State nse_apply(const NavierStokesModel& model, double t, std::span<const double> u) { return model.apply(t, u); }

double NavierStokesModel::inner_h(std::span<const double> a, std::span<const double> b) const {
  return kMass * kernels::dot(a, b);
}

double NavierStokesModel::norm_v(std::span<const double> u) const {
  double s = 0.0;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    auto [k1, k2] = modes_[i];
    s += static_cast<double>(k1 * k1 + k2 * k2) * kernels::sum_squares(u.subspan(4 * i, 4));
  }
  return std::sqrt(kMass * s);
}

double NavierStokesModel::pairing(std::span<const double> f, std::span<const double> v) const {
  return inner_h(f, v);
}

double NavierStokesModel::dual_norm(std::span<const double> f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    auto [k1, k2] = modes_[i];
    s += kernels::sum_squares(f.subspan(4 * i, 4)) / static_cast<double>(k1 * k1 + k2 * k2);
  }
  return std::sqrt(kMass * s);
}

double NavierStokesModel::rho(std::span<const double> u) const {
  // The quadrature grid exceeds 4N, so the trapezoid rule integrates |u|^4 exactly.
  auto [u1, u2] = to_grid(u, fft_quad_->grid());
  std::vector<double> sq(u1.size());
  kernels::mul_add_pairs(u1, u1, u2, u2, sq);
  const double m = static_cast<double>(fft_quad_->grid());
  return 4.0 * std::numbers::pi * std::numbers::pi / (m * m) * kernels::sum_squares(sq);
}

double NavierStokesModel::forcing_level(double t) const {
  if (!forcing_) return constants_.c_bound;
  State h = forcing_at(t);
  return forcing_constant() * inner_h(h, h);
}

double NavierStokesModel::monotone_level(double t) const {
  if (!forcing_) return constants_.c_monotone;
  return forcing_level(t);
}

State NavierStokesModel::embed_h(std::span<const double> u) const {
  State y(u.size());
  kernels::scale_into(std::sqrt(kMass), u, y);
  return y;
}

State NavierStokesModel::random_state(std::mt19937_64& rng, double scale) const {
  std::normal_distribution<double> normal;
  State u(dimension());
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    auto [k1, k2] = modes_[i];
    double w = scale / static_cast<double>(k1 * k1 + k2 * k2);
    for (std::size_t c = 0; c < 4; ++c) u[4 * i + c] = w * normal(rng);
  }
  return project(u);
}

State NavierStokesModel::project(std::span<const double> u) const {
  if (u.size() != dimension()) throw DomainError("state has the wrong dimension");
  State out(u.begin(), u.end());
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    auto [k1, k2] = modes_[i];
    const double a = static_cast<double>(k1), b = static_cast<double>(k2);
    const double kk = a * a + b * b;
    const double re = (a * u[4 * i] + b * u[4 * i + 2]) / kk;
    const double im = (a * u[4 * i + 1] + b * u[4 * i + 3]) / kk;
    out[4 * i] -= a * re;
    out[4 * i + 1] -= a * im;
    out[4 * i + 2] -= b * re;
    out[4 * i + 3] -= b * im;
  }
  return out;
}

double NavierStokesModel::divergence_defect(std::span<const double> u) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    auto [k1, k2] = modes_[i];
    const double a = static_cast<double>(k1), b = static_cast<double>(k2);
    const double re = a * u[4 * i] + b * u[4 * i + 2];
    const double im = a * u[4 * i + 1] + b * u[4 * i + 3];
    worst = std::max(worst, std::hypot(re, im) / std::hypot(a, b));
  }
  return worst;
}

void NavierStokesModel::validate_state(std::span<const double> u) const {
  GelfandModel::validate_state(u);
  double scale = 0.0;
  for (double v : u) scale = std::max(scale, std::abs(v));
  if (divergence_defect(u) > 1e-12 * (1.0 + scale)) {
    throw PreconditionError("velocity field is not divergence free");
  }
}

std::pair<std::vector<double>, std::vector<double>> NavierStokesModel::to_grid(std::span<const double> u,
                                                                               std::size_t m) const {
  if (m % 2 != 0 || m <= 2 * n_) throw DomainError("grid must be even and exceed twice the truncation");
  if (u.size() != dimension()) throw DomainError("state has the wrong dimension");
  std::unique_ptr<fft::Real2d> local;
  const fft::Real2d* plan = m == fft_->grid() ? fft_.get() : m == fft_quad_->grid() ? fft_quad_.get() : nullptr;
  if (!plan) {
    local = std::make_unique<fft::Real2d>(m);
    plan = local.get();
  }
  const fft::Real2d& t = *plan;
  std::vector<std::complex<double>> spec(t.spectral_size());
  std::vector<double> u1(m * m), u2(m * m);
  fill_spectrum(u, 0, -1, spec, m);
  t.backward(spec, u1);
  fill_spectrum(u, 1, -1, spec, m);
  t.backward(spec, u2);
  return {std::move(u1), std::move(u2)};
}

State NavierStokesModel::from_grid(std::span<const double> u1, std::span<const double> u2, std::size_t m) const {
  if (m % 2 != 0 || m <= 2 * n_) throw DomainError("grid must be even and exceed twice the truncation");
  if (u1.size() != m * m || u2.size() != m * m) throw DomainError("grid data has the wrong size");
  fft::Real2d t(m);
  std::vector<std::complex<double>> spec(t.spectral_size());
  std::vector<double> buf(m * m);
  State out(dimension());
  const std::size_t cols = m / 2 + 1;
  const double norm = 1.0 / static_cast<double>(m * m);
  for (std::size_t comp = 0; comp < 2; ++comp) {
    const auto& src = comp == 0 ? u1 : u2;
    std::copy(src.begin(), src.end(), buf.begin());
    t.forward(buf, spec);
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      auto [k1, k2] = modes_[i];
      auto c = spec[wrap(k1, m) * cols + static_cast<std::size_t>(k2)] * norm;
      out[4 * i + 2 * comp] = c.real();
      out[4 * i + 2 * comp + 1] = c.imag();
    }
  }
  return out;
}

State NavierStokesModel::imex_step(double t, double dt, double z, std::span<const double> v) const {
  State u(v.size());
  kernels::scale_into(1.0 / z, v, u);
  State rhs = bilinear(u);
  if (forcing_) kernels::axpy(forcing_->envelope(t), forcing_->shape, rhs);
  State out(v.begin(), v.end());
  kernels::axpy(dt * z, rhs, out);
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    auto [k1, k2] = modes_[i];
    const double denom = 1.0 + dt * nu_ * static_cast<double>(k1 * k1 + k2 * k2);
    for (std::size_t c = 0; c < 4; ++c) out[4 * i + c] /= denom;
  }
  return out;
}

nlohmann::json NavierStokesModel::describe() const {
  nlohmann::json j{{"type", "nse"},
                   {"nu", nu_},
                   {"truncation", n_},
                   {"dealias_grid", fft_->grid()},
                   {"quadrature_grid", fft_quad_->grid()},
                   {"constants", to_json(constants_)}};
  if (forcing_) j["forcing"] = {{"envelope", forcing_->envelope.to_json()}};
  return j;
}

}  // namespace fbmlab
