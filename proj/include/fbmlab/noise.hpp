#pragma once

// Two-sided fractional Brownian motion on a uniform grid, the Wiener shift
// acting on it, and path-regularity diagnostics.

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fbmlab {

/// Hurst index restricted to (1/2, 1).
class HurstIndex {
 public:
  explicit HurstIndex(double value);
  double value() const { return value_; }
  friend bool operator==(HurstIndex, HurstIndex) = default;

 private:
  double value_;
};

/// Autocovariance of unit-step fractional Gaussian noise at lag k:
/// (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.
/// Accepts any H in (0, 1) so that Brownian (H = 1/2) reference cases can be
/// generated; HurstIndex enforces the (1/2, 1) restriction for paths.
double fgn_autocovariance(double hurst, std::uint64_t lag);

/// Circulant-embedding (Davies-Harte) fGn sample of length n with covariance
/// step^{2H} * fgn_autocovariance(H, k). Deterministic in (H, n, step, seed).
/// Throws NumericalError when an embedding eigenvalue lies below -1e-10.
std::vector<double> sample_fgn(double hurst, std::size_t n, double step, std::uint64_t seed);

/// Smallest eigenvalue of the circulant embedding used by sample_fgn.
double circulant_min_eigenvalue(double hurst, std::size_t n);

/// Exact-covariance sampler backed by a dense Cholesky factor of the fGn
/// Toeplitz matrix. Intended as an oracle; n is limited to 4096.
class ExactFgnSampler {
 public:
  ExactFgnSampler(double hurst, std::size_t n, double step);
  std::vector<double> sample(std::uint64_t seed) const;
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  double scale_;
  Eigen::MatrixXd lower_;
};

/// One-shot form of ExactFgnSampler.
std::vector<double> sample_fgn_exact(double hurst, std::size_t n, double step, std::uint64_t seed);

/// Sampled fBm realization on k*step for k in [-n_past, n_future], anchored at 0.
class TwoSidedPath {
 public:
  TwoSidedPath(HurstIndex hurst, double step, std::size_t n_past, std::size_t n_future,
               std::uint64_t seed, std::vector<double> samples);

  /// Integrates increments outward from the origin so samples[n_past] == 0 exactly.
  static TwoSidedPath from_increments(HurstIndex hurst, double step, std::size_t n_past,
                                      std::span<const double> increments, std::uint64_t seed = 0);

  HurstIndex hurst() const { return hurst_; }
  double step() const { return step_; }
  std::size_t n_past() const { return n_past_; }
  std::size_t n_future() const { return n_future_; }
  std::uint64_t seed() const { return seed_; }
  std::span<const double> samples() const { return samples_; }

  /// Value at grid index k (time k*step); RangeError outside [-n_past, n_future].
  double at(std::int64_t k) const;
  double time(std::int64_t k) const { return static_cast<double>(k) * step_; }
  std::int64_t first_index() const { return -static_cast<std::int64_t>(n_past_); }
  std::int64_t last_index() const { return static_cast<std::int64_t>(n_future_); }

  /// Keeps every `factor`-th sample around the origin (step * factor).
  TwoSidedPath coarsened(std::size_t factor) const;

 private:
  HurstIndex hurst_;
  double step_;
  std::size_t n_past_;
  std::size_t n_future_;
  std::uint64_t seed_;
  std::vector<double> samples_;
};

/// Draws one fGn sequence over the whole two-sided grid and integrates it
/// from the origin, so past and future increments stay correlated.
TwoSidedPath build_two_sided_path(HurstIndex hurst, double step, std::size_t n_past,
                                  std::size_t n_future, std::uint64_t seed);

/// The shifted realization (theta_s omega)_t = omega_{t+s} - omega_s with
/// s = shift_steps * step. Holds a shared reference to an immutable base path.
class PathView {
 public:
  PathView(std::shared_ptr<const TwoSidedPath> base, std::int64_t shift_steps = 0);

  const TwoSidedPath& base() const { return *base_; }
  const std::shared_ptr<const TwoSidedPath>& base_ptr() const { return base_; }
  std::int64_t shift_steps() const { return shift_; }
  double step() const { return base_->step(); }
  double shift_time() const { return static_cast<double>(shift_) * base_->step(); }

  /// Composition adds shift steps: view.shifted(b) == theta_b theta_a omega.
  PathView shifted(std::int64_t steps) const { return PathView(base_, shift_ + steps); }

  /// Value at own grid index k; RangeError outside the base window.
  double at(std::int64_t k) const;
  /// omega_{k+1} - omega_k taken from the base samples, so increments of every
  /// shifted view coincide bitwise with the base increments.
  double increment(std::int64_t k) const;

  std::int64_t first_index() const { return base_->first_index() - shift_; }
  std::int64_t last_index() const { return base_->last_index() - shift_; }
  bool covers(std::int64_t k0, std::int64_t k1) const { return k0 >= first_index() && k1 <= last_index(); }

  /// Grid index of a time, RangeError if t is not a multiple of the step.
  std::int64_t index_of(double t) const;

 private:
  std::shared_ptr<const TwoSidedPath> base_;
  std::int64_t shift_;
};

/// Wiener shift on a path (shift_steps may be negative).
PathView shift_path(const PathView& path, std::int64_t shift_steps);

/// Converts a time to a grid index on a grid with the given step; throws
/// RangeError unless t is an integer multiple of step (to 1e-9 relative).
std::int64_t aligned_index(double t, double step);

struct TimeWindow {
  double begin;
  double end;
};

struct HolderEstimate {
  double exponent;
  double seminorm;
  TimeWindow window;
  bool strided;  // true when only dyadic strides were scanned (lower bound)
};

/// max |w_t - w_s| / |t - s|^exponent over sampled pairs of the window. Above
/// 4096 samples only pair strides 1, 2, 4, ... are used.
HolderEstimate holder_seminorm(const PathView& path, double exponent, TimeWindow window);

/// Same estimator for a uniformly sampled series with values[i] at start + i*step.
HolderEstimate holder_seminorm(std::span<const double> values, double start, double step,
                               double exponent);

struct GrowthPoint {
  double time;
  double ratio;
};

/// |omega_t| / |t| for every grid time with |t| >= 1.
std::vector<GrowthPoint> growth_ratio(const PathView& path);

}  // namespace fbmlab
