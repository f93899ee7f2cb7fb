#pragma once

// Pathwise Young calculus on uniform grids: left-point Riemann sums with
// compensated accumulation in increasing time order, the exponential
// transform e^{-beta omega}, and residual checks for the transform and
// product-rule identities.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbmlab/noise.hpp"

namespace fbmlab {

struct UniformGrid {
  double start = 0.0;
  double step = 1.0;
  std::size_t count = 0;

  double time(std::size_t i) const { return start + static_cast<double>(i) * step; }
  double end() const { return time(count - 1); }
  /// Offset of an aligned time within the grid; RangeError otherwise.
  std::size_t offset_of(double t) const;
};

/// Scalar series sampled on a uniform grid.
class SampledPath {
 public:
  SampledPath(UniformGrid grid, std::vector<double> values);

  static SampledPath from_function(UniformGrid grid, const std::function<double(double)>& f);
  /// Copies the view's values on an aligned window.
  static SampledPath from_view(const PathView& path, TimeWindow window);

  const UniformGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  /// Same values on a grid whose start is moved by `delta` (Y_{. + delta}).
  SampledPath reindexed(double delta) const;

 private:
  UniformGrid grid_;
  std::vector<double> values_;
};

/// Neumaier-compensated running sum; the value depends only on the order of add().
class CompensatedSum {
 public:
  void add(double term);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Left-point sum  sum_{[u,v]} y_u (x_v - x_u)  over the grid cells of [s, t].
double young_integral(const SampledPath& y, const SampledPath& x, double s, double t);

/// Same sum with the driver given as a (possibly shifted) noise path. Driver
/// increments come straight from the base samples.
double young_integral(const SampledPath& y, const PathView& x, double s, double t);

/// Sewing-type bound C h_x h_y dt^{zeta+xi} with C = 2 / (1 - 2^{1-(zeta+xi)}).
double young_remainder_bound(double h_x, double h_y, double dt, double zeta, double xi);

/// The transform z_t = e^{-beta omega_t} and its inverse on a window.
struct ExpCocycle {
  double beta;
  SampledPath z;
  SampledPath z_inv;
};

/// Throws RangeError naming the time where |beta omega_t| > 700.
ExpCocycle exp_transform(double beta, const PathView& path, TimeWindow window);

/// sup_t | z_t - z_{t0} + beta * int_{t0}^t z d omega |.
double exp_sde_residual(const ExpCocycle& cocycle, const PathView& path, TimeWindow window);

/// A scalar process with dX = drift dt + diffusion d omega, all sampled on one grid.
struct PathDecomposition {
  SampledPath value;
  SampledPath drift;
  SampledPath diffusion;
};

/// sup_t | (XY)_t - (XY)_{t0} - int (X dY + Y dX) | with the integrals
/// expanded through each factor's decomposition.
double product_rule_residual(const PathDecomposition& x, const PathDecomposition& y, const PathView& driver,
                             TimeWindow window);

/// | int_{t1}^{t2} Y d omega - int_{t1-s}^{t2-s} Y_{.+s} d(theta_s omega) | with
/// s = shift_steps * step; identical Riemann terms make it vanish exactly.
double shift_integral_gap(const SampledPath& y, const PathView& path, double t1, double t2,
                          std::int64_t shift_steps);

struct ResidualReport {
  std::string operation;
  TimeWindow window;
  double step;
  double residual;
};

nlohmann::json to_json(const ResidualReport& report);

}  // namespace fbmlab
