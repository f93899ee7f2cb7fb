#include "fbmlab/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fbmlab/error.hpp"
#include "fbmlab/kernels.hpp"
#include "fbmlab/noise_io.hpp"
#include "fbmlab/parallel.hpp"
#include "fbmlab/young.hpp"

namespace fbmlab {

CocycleHandle::CocycleHandle(ModelPtr model, double beta, SolveConfig cfg, PathView path)
    : model_(std::move(model)), beta_(beta), cfg_(cfg), path_(std::move(path)) {
  if (!model_) throw ConfigError("cocycle needs a model");
  if (!std::isfinite(beta)) throw ConfigError("beta must be finite");
  cfg_.validate(path_.step());
}

State CocycleHandle::evaluate(double t, double tau, std::span<const double> x) const {
  if (t < 0.0) throw DomainError("cocycle time must be nonnegative");
  if (t == 0.0) return State(x.begin(), x.end());
  SolveConfig cfg = cfg_;
  cfg.record_every = 0;
  return solve(*model_, path_, beta_, x, {tau, tau + t}, cfg).final_state();
}

CocycleHandle CocycleHandle::shifted(std::int64_t steps) const {
  SolveConfig cfg = cfg_;
  cfg.time_offset += static_cast<double>(steps) * path_.step();
  return CocycleHandle(model_, beta_, cfg, path_.shifted(steps));
}

double hausdorff_semidist(std::span<const State> a, std::span<const State> b) {
  if (a.empty()) throw DomainError("semi-distance from an empty set is undefined");
  if (b.empty()) return std::numeric_limits<double>::infinity();
  const std::size_t dim = b.front().size();
  std::vector<double> cloud;
  cloud.reserve(b.size() * dim);
  for (const auto& p : b) {
    if (p.size() != dim) throw DomainError("point cloud has mixed dimensions");
    cloud.insert(cloud.end(), p.begin(), p.end());
  }
  double worst = 0.0;
  for (const auto& p : a) {
    if (p.size() != dim) throw DomainError("point clouds live in different spaces");
    worst = std::max(worst, kernels::min_squared_distance(p, cloud, dim));
  }
  return std::sqrt(worst);
}

double hausdorff_semidist(const GelfandModel& model, std::span<const State> a, std::span<const State> b) {
  std::vector<State> ea, eb;
  ea.reserve(a.size());
  eb.reserve(b.size());
  for (const auto& p : a) ea.push_back(model.embed_h(p));
  for (const auto& p : b) eb.push_back(model.embed_h(p));
  return hausdorff_semidist(ea, eb);
}

std::string_view regime_name(RadiusRegime regime) {
  switch (regime) {
    case RadiusRegime::alpha_eq_2: return "alpha-eq-2";
    case RadiusRegime::alpha_gt_2: return "alpha-gt-2";
    case RadiusRegime::nonautonomous: return "nonautonomous";
  }
  return "unknown";
}

nlohmann::json to_json(const AbsorbingEstimate& e) {
  return {{"radius_sq", e.radius_sq}, {"truncation_horizon", e.truncation_horizon}, {"tail_bound", e.tail_bound},
          {"regime", regime_name(e.regime)}, {"kappa", e.kappa}, {"constant", e.constant}};
}

namespace {

// Young's-inequality constant: max_s (a s^2 - eps s^alpha) for alpha > 2.
double young_constant(double a, double eps, double alpha) {
  if (a <= 0.0) return 0.0;
  return a * (1.0 - 2.0 / alpha) * std::pow(2.0 * a / (eps * alpha), 2.0 / (alpha - 2.0));
}

double resolve_epsilon(std::optional<double> epsilon, double gamma) {
  const double eps = epsilon.value_or(gamma / 2.0);
  if (!(eps > 0.0 && eps < gamma)) throw ConfigError("epsilon must lie in (0, gamma)");
  return eps;
}

struct Quadrature {
  double integral;
  double horizon;
  double tail;
};

// Trapezoid rule for int_{-T}^0 w(r) e^{-2 beta omega_r + kappa r} dr on the path grid.
Quadrature radius_quadrature(const PathView& path, double beta, double kappa, const std::function<double(double)>& w,
                             std::optional<double> horizon) {
  const double h = path.step();
  const std::int64_t first = path.first_index();
  if (first > 0 || path.last_index() < 0) throw RangeError("path does not cover the origin");
  std::int64_t stop = first;
  if (horizon) {
    if (!(*horizon > 0.0)) throw ConfigError("radius horizon must be positive");
    stop = -aligned_index(*horizon, h);
    if (stop < first) throw RangeError("path does not cover the radius horizon");
  }
  // Suffix growth envelope G_k = max_{j <= k, |t_j| >= 1} |omega_j| / |t_j| and weight bound.
  const std::size_t span = static_cast<std::size_t>(-first) + 1;
  std::vector<double> growth(span, 0.0);
  double g = 0.0;
  double weight_sup = 0.0;
  for (std::int64_t k = first; k <= 0; ++k) {
    const double t = static_cast<double>(k) * h;
    if (std::abs(t) >= 1.0) g = std::max(g, std::abs(path.at(k)) / std::abs(t));
    growth[static_cast<std::size_t>(k - first)] = g;
    weight_sup = std::max(weight_sup, std::abs(w(t)));
  }
  auto integrand = [&](std::int64_t k) {
    const double r = static_cast<double>(k) * h;
    const double e = -2.0 * beta * path.at(k) + kappa * r;
    if (e > 700.0) throw NumericalError("radius integrand overflows at r = " + format_real(r));
    return w(r) * std::exp(e);
  };
  auto tail_at = [&](std::int64_t k) {
    const double T = -static_cast<double>(k) * h;
    const double rate = kappa - 2.0 * std::abs(beta) * growth[static_cast<std::size_t>(k - first)];
    if (T < 1.0 && beta != 0.0) return std::numeric_limits<double>::infinity();
    if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
    return weight_sup * std::exp(-rate * T) / rate;
  };
  CompensatedSum sum;
  double prev = integrand(0);
  std::int64_t k = 0;
  double tail = tail_at(0);
  while (k > stop) {
    const double cur = integrand(k - 1);
    sum.add(0.5 * h * (prev + cur));
    prev = cur;
    --k;
    tail = tail_at(k);
    if (!horizon && tail <= 1e-8 * sum.value()) break;
  }
  return {sum.value(), -static_cast<double>(k) * h, tail};
}

}  // namespace

AbsorbingEstimate absorbing_radius_autonomous(const PathView& path, const TripleConstants& c, double beta,
                                              std::optional<double> epsilon, std::optional<double> horizon) {
  c.validate();
  AbsorbingEstimate out{};
  if (c.alpha == 2.0) {
    out.regime = RadiusRegime::alpha_eq_2;
    out.kappa = c.lambda_embed * c.gamma_coercive - c.k_coercive;
    out.constant = c.c_bound;
  } else {
    const double eps = resolve_epsilon(epsilon, c.gamma_coercive);
    out.regime = RadiusRegime::alpha_gt_2;
    out.kappa = c.lambda_embed * (c.gamma_coercive - eps);
    out.constant = c.c_bound + young_constant(c.k_coercive / c.lambda_embed, eps, c.alpha) +
                   (c.gamma_coercive - eps) * young_constant(1.0, 1.0, c.alpha);
  }
  const double w = out.constant;
  auto q = radius_quadrature(path, beta, out.kappa, [w](double) { return w; }, horizon);
  out.radius_sq = 1.0 + q.integral;
  out.truncation_horizon = q.horizon;
  out.tail_bound = q.tail;
  return out;
}

AbsorbingEstimate absorbing_radius_nonautonomous(const PathView& path, const TripleConstants& c, double beta,
                                                 std::optional<double> epsilon, double tau,
                                                 const std::function<double(double)>& f,
                                                 std::optional<double> horizon) {
  c.validate();
  const std::array<double, 2> etas{0.1, 1.0};
  if (!certify_exponential_integrability(f, tau, etas, 200.0).certified) {
    throw ConfigError("forcing is not certified exponentially integrable");
  }
  AbsorbingEstimate out{};
  out.regime = RadiusRegime::nonautonomous;
  if (c.alpha == 2.0) {
    out.kappa = c.lambda_embed * c.gamma_coercive - c.k_coercive;
    out.constant = 0.0;
  } else {
    const double eps = resolve_epsilon(epsilon, c.gamma_coercive);
    out.kappa = c.lambda_embed * (c.gamma_coercive - eps);
    out.constant = young_constant(c.k_coercive / c.lambda_embed, eps, c.alpha) +
                   (c.gamma_coercive - eps) * young_constant(1.0, 1.0, c.alpha);
  }
  const double base = out.constant;
  auto q = radius_quadrature(path, beta, out.kappa, [&](double r) { return base + std::abs(f(r + tau)); }, horizon);
  out.radius_sq = 1.0 + q.integral;
  out.truncation_horizon = q.horizon;
  out.tail_bound = q.tail;
  return out;
}

bool TemperednessReport::all_decayed() const {
  return std::all_of(decayed.begin(), decayed.end(), [](bool b) { return b; });
}

TemperednessReport temperedness_stat(const std::function<double(const PathView&)>& radius_fn, const PathView& path,
                                     std::span<const double> etas, double horizon, double spacing) {
  for (double eta : etas) {
    if (!(eta > 0.0)) throw DomainError("temperedness requires eta > 0");
  }
  const std::int64_t stride = aligned_index(spacing, path.step());
  const std::int64_t last = aligned_index(horizon, path.step());
  if (stride <= 0 || last < 0) throw DomainError("temperedness horizon and spacing must be positive");
  TemperednessReport rep;
  rep.etas.assign(etas.begin(), etas.end());
  std::vector<double> radii;
  for (std::int64_t k = 0; k <= last; k += stride) {
    rep.times.push_back(static_cast<double>(k) * path.step());
    radii.push_back(radius_fn(path.shifted(-k)));
  }
  for (double eta : etas) {
    std::vector<double> row(radii.size());
    double hit = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < radii.size(); ++i) {
      row[i] = std::exp(-eta * rep.times[i]) * radii[i];
      if (std::isnan(hit) && row[i] < 1e-6 * row[0]) hit = rep.times[i];
    }
    rep.series.push_back(std::move(row));
    rep.decayed.push_back(!std::isnan(hit));
    rep.decay_time.push_back(hit);
  }
  return rep;
}

PullbackEnsemble pullback_evolve(const CocycleHandle& cocycle, std::span<const double> pullback_times,
                                 std::span<const State> initial_set, double fiber_time) {
  if (initial_set.empty()) throw DomainError("pullback needs a nonempty initial set");
  for (double T : pullback_times) {
    if (!(T >= 0.0)) throw DomainError("pullback times must be nonnegative");
  }
  PullbackEnsemble ens;
  ens.fiber_time = fiber_time;
  ens.pullback_times.assign(pullback_times.begin(), pullback_times.end());
  ens.initial_set.assign(initial_set.begin(), initial_set.end());
  const std::size_t nx = initial_set.size();
  ens.fibers.assign(pullback_times.size(), std::vector<State>(nx));
  parallel_for(pullback_times.size() * nx, [&](std::size_t idx) {
    const std::size_t i = idx / nx;
    const std::size_t j = idx % nx;
    const double T = pullback_times[i];
    try {
      ens.fibers[i][j] = cocycle.evaluate(T, fiber_time - T, initial_set[j]);
    } catch (const ConfigError& e) {
      throw ConfigError("pullback T = " + format_real(T) + ", point " + std::to_string(j) + ": " + e.what());
    } catch (const RangeError& e) {
      throw RangeError("pullback T = " + format_real(T) + ", point " + std::to_string(j) + ": " + e.what());
    } catch (const Error& e) {
      throw NumericalError("pullback T = " + format_real(T) + ", point " + std::to_string(j) + ": " + e.what());
    }
  });
  return ens;
}

AttractorEstimate attractor_estimate(const GelfandModel& model, const PullbackEnsemble& ensemble, double tolerance) {
  if (ensemble.fibers.size() < 2) throw DomainError("attractor estimate needs at least two pullback times");
  AttractorEstimate est;
  est.fiber_time = ensemble.fiber_time;
  est.pullback_times = ensemble.pullback_times;
  est.points = ensemble.fibers.back();
  for (const auto& fiber : ensemble.fibers) est.semidist_history.push_back(hausdorff_semidist(model, fiber, est.points));
  std::vector<State> embedded;
  for (const auto& p : est.points) embedded.push_back(model.embed_h(p));
  for (std::size_t i = 0; i < embedded.size(); ++i) {
    for (std::size_t j = i + 1; j < embedded.size(); ++j) {
      est.diameter = std::max(est.diameter, std::sqrt(kernels::squared_distance(embedded[i], embedded[j])));
    }
  }
  const auto& h = est.semidist_history;
  const double slack = 1e-9 * *std::max_element(h.begin(), h.end());
  est.nonincreasing = true;
  for (std::size_t i = 1; i < h.size(); ++i) est.nonincreasing = est.nonincreasing && h[i] <= h[i - 1] + slack;
  est.convergence_measure = h[h.size() - 2];
  est.converged = est.nonincreasing && est.convergence_measure < tolerance;
  return est;
}

double cocycle_gap(const CocycleHandle& cocycle, double s, double t, std::span<const double> x) {
  if (s < 0.0 || t < 0.0) throw DomainError("cocycle times must be nonnegative");
  const State direct = cocycle.phi(t + s, x);
  const State mid = cocycle.phi(t, x);
  const State composed = cocycle.shifted(cocycle.path().index_of(t)).phi(s, mid);
  State d = direct;
  kernels::axpy(-1.0, composed, d);
  return cocycle.model().norm_h(d);
}

double attractor_invariance_gap(const AttractorEstimate& estimate, const CocycleHandle& cocycle, double t,
                                const AttractorEstimate& shifted_estimate) {
  std::vector<State> images;
  images.reserve(estimate.points.size());
  for (const auto& p : estimate.points) images.push_back(cocycle.evaluate(t, estimate.fiber_time, p));
  const auto& model = cocycle.model();
  return std::max(hausdorff_semidist(model, images, shifted_estimate.points),
                  hausdorff_semidist(model, shifted_estimate.points, images));
}

nlohmann::json to_json(const AttractorEstimate& e) {
  nlohmann::json j{{"fiber_time", e.fiber_time},
                   {"pullback_times", e.pullback_times},
                   {"semidist_history", e.semidist_history},
                   {"diameter", e.diameter},
                   {"convergence_measure", e.convergence_measure},
                   {"converged", e.converged}};
  j["invariance_gap"] = std::isnan(e.invariance_gap) ? nlohmann::json(nullptr) : nlohmann::json(e.invariance_gap);
  return j;
}

std::string points_to_csv(std::span<const State> points) {
  std::ostringstream out;
  const std::size_t dim = points.empty() ? 0 : points.front().size();
  for (std::size_t j = 0; j < dim; ++j) out << (j ? "," : "") << "coeff_" << j;
  out << '\n';
  for (const auto& p : points) {
    for (std::size_t j = 0; j < p.size(); ++j) out << (j ? "," : "") << format_real(p[j]);
    out << '\n';
  }
  return out.str();
}

}  // namespace fbmlab
