#include <algorithm>
#include <cmath>
#include <limits>

#include "fbmlab/error.hpp"
#include "fbmlab/kernels.hpp"
#include "fbmlab/models.hpp"

namespace fbmlab {

namespace {

State difference(std::span<const double> a, std::span<const double> b) {
  State d(a.begin(), a.end());
  kernels::axpy(-1.0, b, d);
  return d;
}

// |A(t,v)|_{V*}^{alpha/(alpha-1)} and the growth denominator without C.
std::pair<double, double> growth_terms(const GelfandModel& model, double t, std::span<const double> v) {
  const auto& c = model.constants();
  const double numer = std::pow(model.dual_norm(model.apply(t, v)), c.alpha / (c.alpha - 1.0));
  const double level = model.autonomous() ? 1.0 : model.forcing_level(t);
  const double denom =
      (level + std::pow(model.norm_v(v), c.alpha)) * (1.0 + std::pow(model.norm_h(v), c.varpi));
  return {numer, denom};
}

std::pair<double, double> uniqueness_terms(const GelfandModel& model, std::span<const double> v) {
  const auto& c = model.constants();
  const double numer = model.eta(v) + model.rho(v);
  const double denom = (1.0 + std::pow(model.norm_v(v), c.alpha)) * (1.0 + std::pow(model.norm_h(v), c.vartheta));
  return {numer, denom};
}

double safe_ratio(double numer, double denom) {
  if (numer == 0.0) return 0.0;
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return numer / denom;
}

}  // namespace

std::vector<State> sample_states(const GelfandModel& model, std::size_t count, std::uint64_t seed, double scale,
                                 double log_scale_spread) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> spread(-log_scale_spread, log_scale_spread);
  std::vector<State> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double s = log_scale_spread > 0.0 ? scale * std::pow(10.0, spread(rng)) : scale;
    out.push_back(model.random_state(rng, s));
  }
  return out;
}

double check_coercivity(const GelfandModel& model, double t, std::span<const State> samples) {
  const auto& c = model.constants();
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& v : samples) {
    const double h = model.norm_h(v);
    const double slack = -c.gamma_coercive * std::pow(model.norm_v(v), c.alpha) + c.k_coercive * h * h +
                         model.forcing_level(t) - 2.0 * model.pairing(model.apply(t, v), v);
    worst = std::min(worst, slack);
  }
  return worst;
}

double check_growth(const GelfandModel& model, double t, std::span<const State> samples) {
  double worst = 0.0;
  for (const auto& v : samples) {
    auto [numer, denom] = growth_terms(model, t, v);
    worst = std::max(worst, safe_ratio(numer, model.constants().c_bound * denom));
  }
  return worst;
}

double check_local_monotonicity(const GelfandModel& model, double t,
                                std::span<const std::pair<State, State>> pairs) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& [v1, v2] : pairs) {
    const State w = difference(v1, v2);
    const State dA = difference(model.apply(t, v1), model.apply(t, v2));
    const double h = model.norm_h(w);
    const double slack =
        (model.monotone_level(t) + model.eta(v1) + model.rho(v2)) * h * h - 2.0 * model.pairing(dA, w);
    worst = std::min(worst, slack);
  }
  return worst;
}

double check_hemicontinuity(const GelfandModel& model, double t, std::span<const std::array<State, 3>> triples) {
  constexpr double kDelta = 0x1p-20;
  constexpr int kPoints = 16;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& [v1, v2, v] : triples) {
    auto phi = [&](double s) {
      State x(v1.begin(), v1.end());
      kernels::axpy(s, v2, x);
      return model.pairing(model.apply(t, x), v);
    };
    double jump = 0.0;
    double scale = 0.0;
    for (int i = 0; i <= kPoints; ++i) {
      const double s = -1.0 + 2.0 * i / kPoints;
      const double a = phi(s);
      jump = std::max(jump, std::abs(phi(s + kDelta) - a));
      scale = std::max(scale, std::abs(a));
    }
    worst = std::min(worst, 1e-4 * (1.0 + scale) - jump);
  }
  return worst;
}

double check_uniqueness_condition(const GelfandModel& model, std::span<const State> samples) {
  double worst = 0.0;
  for (const auto& v : samples) {
    auto [numer, denom] = uniqueness_terms(model, v);
    worst = std::max(worst, safe_ratio(numer, model.constants().c_bound * denom));
  }
  return worst;
}

double check_embedding(const GelfandModel& model, std::span<const State> samples) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& v : samples) {
    const double nv = model.norm_v(v);
    const double nh = model.norm_h(v);
    worst = std::min(worst, nv * nv - model.constants().lambda_embed * nh * nh);
  }
  return worst;
}

EtaRho eta_rho_eval(const GelfandModel& model, std::span<const double> v) {
  model.validate_state(v);
  return {model.eta(v), model.rho(v)};
}

double calibrate_growth_constant(const GelfandModel& model, double t, std::span<const State> pilot, double safety) {
  if (pilot.empty()) throw DomainError("calibration needs a nonempty pilot sample");
  if (!(safety >= 1.0)) throw DomainError("calibration safety factor must be >= 1");
  double worst = 0.0;
  for (const auto& v : pilot) {
    auto [numer, denom] = growth_terms(model, t, v);
    worst = std::max(worst, safe_ratio(numer, denom));
  }
  if (!std::isfinite(worst)) throw NumericalError("growth ratio is unbounded on the pilot sample");
  return std::max(safety * worst, std::numeric_limits<double>::min());
}

double calibrate_uniqueness_constant(const GelfandModel& model, std::span<const State> pilot, double safety) {
  if (pilot.empty()) throw DomainError("calibration needs a nonempty pilot sample");
  double worst = 0.0;
  for (const auto& v : pilot) {
    auto [numer, denom] = uniqueness_terms(model, v);
    worst = std::max(worst, safe_ratio(numer, denom));
  }
  return safety * worst;
}

}  // namespace fbmlab
