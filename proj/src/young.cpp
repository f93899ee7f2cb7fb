#include "fbmlab/young.hpp"

#include <cmath>
#include <string>

#include "fbmlab/error.hpp"

namespace fbmlab {

namespace {

constexpr double kExpLimit = 700.0;

bool same_step(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

/// Left-point sum of y[first + i] * increment(i) for i in [0, cells).
template <class Increment>
double left_point_sum(const SampledPath& y, std::size_t first, std::size_t cells, Increment&& increment) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < cells; ++i) sum.add(y[first + i] * increment(i));
  return sum.value();
}

void check_interval(double s, double t) {
  if (!(s <= t)) throw RangeError("integration interval must satisfy s <= t");
}

}  // namespace

std::size_t UniformGrid::offset_of(double t) const {
  const std::int64_t k = aligned_index(t - start, step);
  if (k < 0 || static_cast<std::size_t>(k) >= count) {
    throw RangeError("time " + std::to_string(t) + " outside the sampled grid");
  }
  return static_cast<std::size_t>(k);
}

SampledPath::SampledPath(UniformGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (!(grid_.step > 0.0)) throw RangeError("grid step must be positive");
  if (grid_.count != values_.size() || values_.empty()) throw RangeError("grid size does not match value count");
  for (double v : values_) {
    if (!std::isfinite(v)) throw NumericalError("sampled path contains non-finite values");
  }
}

SampledPath SampledPath::from_function(UniformGrid grid, const std::function<double(double)>& f) {
  std::vector<double> values(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) values[i] = f(grid.time(i));
  return SampledPath(grid, std::move(values));
}

SampledPath SampledPath::from_view(const PathView& path, TimeWindow window) {
  const std::int64_t k0 = path.index_of(window.begin);
  const std::int64_t k1 = path.index_of(window.end);
  if (k1 < k0 || !path.covers(k0, k1)) throw RangeError("window outside the sampled path");
  std::vector<double> values(static_cast<std::size_t>(k1 - k0 + 1));
  for (std::int64_t k = k0; k <= k1; ++k) values[static_cast<std::size_t>(k - k0)] = path.at(k);
  const UniformGrid grid{static_cast<double>(k0) * path.step(), path.step(), values.size()};
  return SampledPath(grid, std::move(values));
}

SampledPath SampledPath::reindexed(double delta) const {
  UniformGrid g = grid_;
  g.start -= delta;
  return SampledPath(g, values_);
}

void CompensatedSum::add(double term) {
  const double t = sum_ + term;
  if (std::abs(sum_) >= std::abs(term)) {
    compensation_ += (sum_ - t) + term;
  } else {
    compensation_ += (term - t) + sum_;
  }
  sum_ = t;
}

double young_integral(const SampledPath& y, const SampledPath& x, double s, double t) {
  check_interval(s, t);
  if (!same_step(y.grid().step, x.grid().step)) throw RangeError("integrand and driver grids differ");
  const std::size_t ys = y.grid().offset_of(s);
  const std::size_t yt = y.grid().offset_of(t);
  const std::size_t xs = x.grid().offset_of(s);
  x.grid().offset_of(t);
  return left_point_sum(y, ys, yt - ys, [&](std::size_t i) { return x[xs + i + 1] - x[xs + i]; });
}

double young_integral(const SampledPath& y, const PathView& x, double s, double t) {
  check_interval(s, t);
  if (!same_step(y.grid().step, x.step())) throw RangeError("integrand and driver grids differ");
  const std::size_t ys = y.grid().offset_of(s);
  const std::size_t yt = y.grid().offset_of(t);
  const std::int64_t ks = x.index_of(s);
  const std::int64_t kt = x.index_of(t);
  if (!x.covers(ks, kt)) throw RangeError("driver does not cover the integration interval");
  return left_point_sum(y, ys, yt - ys, [&](std::size_t i) { return x.increment(ks + static_cast<std::int64_t>(i)); });
}

double young_remainder_bound(double h_x, double h_y, double dt, double zeta, double xi) {
  const double theta = zeta + xi;
  if (!(theta > 1.0)) throw DomainError("Young regime requires zeta + xi > 1");
  if (dt < 0.0) throw DomainError("interval length must be nonnegative");
  const double constant = 2.0 / (1.0 - std::pow(2.0, 1.0 - theta));
  return constant * h_x * h_y * std::pow(dt, theta);
}

ExpCocycle exp_transform(double beta, const PathView& path, TimeWindow window) {
  const std::int64_t k0 = path.index_of(window.begin);
  const std::int64_t k1 = path.index_of(window.end);
  if (k1 < k0 || !path.covers(k0, k1)) throw RangeError("transform window outside the sampled path");
  const std::size_t n = static_cast<std::size_t>(k1 - k0 + 1);
  std::vector<double> z(n), z_inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t k = k0 + static_cast<std::int64_t>(i);
    const double exponent = beta * path.at(k);
    if (std::abs(exponent) > kExpLimit) {
      throw RangeError("exponential transform overflows at time " + std::to_string(static_cast<double>(k) * path.step()));
    }
    z[i] = std::exp(-exponent);
    z_inv[i] = std::exp(exponent);
  }
  const UniformGrid grid{static_cast<double>(k0) * path.step(), path.step(), n};
  return {beta, SampledPath(grid, std::move(z)), SampledPath(grid, std::move(z_inv))};
}

double exp_sde_residual(const ExpCocycle& cocycle, const PathView& path, TimeWindow window) {
  const auto& z = cocycle.z;
  const std::size_t i0 = z.grid().offset_of(window.begin);
  const std::size_t i1 = z.grid().offset_of(window.end);
  const std::int64_t k0 = path.index_of(window.begin);
  if (!path.covers(k0, path.index_of(window.end))) throw RangeError("residual window outside the sampled path");
  CompensatedSum integral;
  double worst = 0.0;
  for (std::size_t i = i0; i < i1; ++i) {
    integral.add(z[i] * path.increment(k0 + static_cast<std::int64_t>(i - i0)));
    const double r = z[i + 1] - z[i0] + cocycle.beta * integral.value();
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

double product_rule_residual(const PathDecomposition& x, const PathDecomposition& y, const PathView& driver,
                             TimeWindow window) {
  const UniformGrid& g = x.value.grid();
  for (const SampledPath* p : {&x.drift, &x.diffusion, &y.value, &y.drift, &y.diffusion}) {
    if (p->size() != x.value.size() || !same_step(p->grid().step, g.step) ||
        std::abs(p->grid().start - g.start) > 1e-12 * std::max(1.0, std::abs(g.start))) {
      throw RangeError("product-rule decompositions must share one grid");
    }
  }
  if (!same_step(g.step, driver.step())) throw RangeError("decomposition grid differs from the driver grid");
  const std::size_t i0 = g.offset_of(window.begin);
  const std::size_t i1 = g.offset_of(window.end);
  const std::int64_t k0 = driver.index_of(window.begin);
  if (!driver.covers(k0, driver.index_of(window.end))) throw RangeError("window outside the driver path");

  const double start_product = x.value[i0] * y.value[i0];
  CompensatedSum integral;
  double worst = 0.0;
  for (std::size_t i = i0; i < i1; ++i) {
    const double dw = driver.increment(k0 + static_cast<std::int64_t>(i - i0));
    // X dY + Y dX expanded as (X a_Y + Y a_X) dt + (X b_Y + Y b_X) d omega
    integral.add(x.value[i] * y.drift[i] * g.step);
    integral.add(x.value[i] * y.diffusion[i] * dw);
    integral.add(y.value[i] * x.drift[i] * g.step);
    integral.add(y.value[i] * x.diffusion[i] * dw);
    const double r = x.value[i + 1] * y.value[i + 1] - start_product - integral.value();
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

double shift_integral_gap(const SampledPath& y, const PathView& path, double t1, double t2, std::int64_t shift_steps) {
  const double s = static_cast<double>(shift_steps) * path.step();
  const double direct = young_integral(y, path, t1, t2);
  const double shifted = young_integral(y.reindexed(s), path.shifted(shift_steps), t1 - s, t2 - s);
  return std::abs(direct - shifted);
}

nlohmann::json to_json(const ResidualReport& report) {
  return {{"operation", report.operation},
          {"window", {report.window.begin, report.window.end}},
          {"step", report.step},
          {"residual", report.residual}};
}

}  // namespace fbmlab
