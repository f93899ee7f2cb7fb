#include "fbmlab/noise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <random>
#include <string>

#include "fbmlab/error.hpp"
#include "fbmlab/fft.hpp"

namespace fbmlab {

namespace {

constexpr double kEigenvalueFloor = -1e-10;
constexpr std::size_t kExactLimit = 4096;
constexpr std::size_t kAllPairsLimit = 4096;

void check_fgn_hurst(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("fGn Hurst index must lie in (0, 1)");
}

void check_step(double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("grid step must be positive and finite");
}

std::size_t embedding_size(std::size_t n) { return std::bit_ceil(2 * (n - 1)); }

std::vector<double> circulant_eigenvalues(double hurst, std::size_t n) {
  const std::size_t m = embedding_size(n);
  std::vector<std::complex<double>> row(m), eig(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t lag = j <= m / 2 ? j : m - j;
    row[j] = fgn_autocovariance(hurst, lag);
  }
  fft::ComplexForward(m).execute(row, eig);
  std::vector<double> out(m);
  for (std::size_t k = 0; k < m; ++k) out[k] = eig[k].real();
  return out;
}

}  // namespace

HurstIndex::HurstIndex(double value) : value_(value) {
  if (!(value > 0.5 && value < 1.0)) {
    throw ConfigError("Hurst index " + std::to_string(value) + " outside the open interval (1/2, 1)");
  }
}

double fgn_autocovariance(double hurst, std::uint64_t lag) {
  const double k = static_cast<double>(lag);
  const double e = 2.0 * hurst;
  const double below = lag == 0 ? 1.0 : std::pow(k - 1.0, e);
  return 0.5 * (std::pow(k + 1.0, e) - 2.0 * std::pow(k, e) + below);
}

double circulant_min_eigenvalue(double hurst, std::size_t n) {
  check_fgn_hurst(hurst);
  if (n < 2) return 1.0;
  const auto eig = circulant_eigenvalues(hurst, n);
  return *std::min_element(eig.begin(), eig.end());
}

std::vector<double> sample_fgn(double hurst, std::size_t n, double step, std::uint64_t seed) {
  check_fgn_hurst(hurst);
  check_step(step);
  if (n == 0) throw RangeError("sample_fgn needs n >= 1");
  const double scale = std::pow(step, hurst);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  if (n == 1) return {scale * normal(rng)};

  auto eig = circulant_eigenvalues(hurst, n);
  const std::size_t m = eig.size();
  for (std::size_t k = 0; k < m; ++k) {
    if (eig[k] < kEigenvalueFloor) {
      throw NumericalError("circulant embedding eigenvalue " + std::to_string(eig[k]) + " at index " +
                           std::to_string(k) + " below tolerance");
    }
    if (eig[k] < 0.0) eig[k] = 0.0;
  }

  std::vector<std::complex<double>> xi(m), y(m);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    xi[k] = std::sqrt(eig[k] * inv_m) * std::complex<double>(re, im);
  }
  fft::ComplexForward(m).execute(xi, y);

  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = scale * y[j].real();
  return out;
}

ExactFgnSampler::ExactFgnSampler(double hurst, std::size_t n, double step)
    : n_(n), scale_(std::pow(step, hurst)) {
  check_fgn_hurst(hurst);
  check_step(step);
  if (n == 0 || n > kExactLimit) throw RangeError("exact fGn sampler supports 1 <= n <= 4096");
  Eigen::MatrixXd cov(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cov(i, j) = fgn_autocovariance(hurst, i > j ? i - j : j - i);
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericalError("fGn covariance factorization hit a nonpositive pivot");
  lower_ = llt.matrixL();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lower_(i, i) > 0.0)) throw NumericalError("fGn covariance factorization hit a nonpositive pivot");
  }
}

std::vector<double> ExactFgnSampler::sample(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(n_);
  for (std::size_t i = 0; i < n_; ++i) z[i] = normal(rng);
  const Eigen::VectorXd x = lower_.triangularView<Eigen::Lower>() * z;
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = scale_ * x[i];
  return out;
}

std::vector<double> sample_fgn_exact(double hurst, std::size_t n, double step, std::uint64_t seed) {
  return ExactFgnSampler(hurst, n, step).sample(seed);
}

TwoSidedPath::TwoSidedPath(HurstIndex hurst, double step, std::size_t n_past, std::size_t n_future,
                           std::uint64_t seed, std::vector<double> samples)
    : hurst_(hurst), step_(step), n_past_(n_past), n_future_(n_future), seed_(seed), samples_(std::move(samples)) {
  check_step(step);
  if (samples_.size() != n_past + n_future + 1) throw RangeError("path sample count inconsistent with horizons");
  if (samples_[n_past] != 0.0) throw RangeError("path must vanish at the time origin");
  for (double v : samples_) {
    if (!std::isfinite(v)) throw NumericalError("path contains non-finite samples");
  }
}

TwoSidedPath TwoSidedPath::from_increments(HurstIndex hurst, double step, std::size_t n_past,
                                           std::span<const double> increments, std::uint64_t seed) {
  if (increments.size() < n_past) throw RangeError("fewer increments than past steps");
  const std::size_t n_future = increments.size() - n_past;
  std::vector<double> samples(increments.size() + 1);
  samples[n_past] = 0.0;
  for (std::size_t k = n_past; k < increments.size(); ++k) samples[k + 1] = samples[k] + increments[k];
  for (std::size_t k = n_past; k-- > 0;) samples[k] = samples[k + 1] - increments[k];
  return TwoSidedPath(hurst, step, n_past, n_future, seed, std::move(samples));
}

double TwoSidedPath::at(std::int64_t k) const {
  if (k < first_index() || k > last_index()) {
    throw RangeError("time " + std::to_string(time(k)) + " outside the sampled path window");
  }
  return samples_[static_cast<std::size_t>(k + static_cast<std::int64_t>(n_past_))];
}

TwoSidedPath TwoSidedPath::coarsened(std::size_t factor) const {
  if (factor == 0) throw RangeError("coarsening factor must be positive");
  const std::size_t past = n_past_ / factor;
  const std::size_t future = n_future_ / factor;
  std::vector<double> out(past + future + 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = samples_[n_past_ - past * factor + i * factor];
  }
  return TwoSidedPath(hurst_, step_ * static_cast<double>(factor), past, future, seed_, std::move(out));
}

TwoSidedPath build_two_sided_path(HurstIndex hurst, double step, std::size_t n_past, std::size_t n_future,
                                  std::uint64_t seed) {
  if (n_past + n_future == 0) throw RangeError("two-sided path needs at least one step");
  const auto increments = sample_fgn(hurst.value(), n_past + n_future, step, seed);
  return TwoSidedPath::from_increments(hurst, step, n_past, increments, seed);
}

PathView::PathView(std::shared_ptr<const TwoSidedPath> base, std::int64_t shift_steps)
    : base_(std::move(base)), shift_(shift_steps) {
  if (!base_) throw RangeError("path view needs a base path");
  if (shift_ < base_->first_index() || shift_ > base_->last_index()) {
    throw RangeError("shift " + std::to_string(shift_time()) + " moves the origin outside the sampled path");
  }
}

double PathView::at(std::int64_t k) const {
  if (shift_ == 0) return base_->at(k);
  return base_->at(k + shift_) - base_->at(shift_);
}

double PathView::increment(std::int64_t k) const { return base_->at(k + shift_ + 1) - base_->at(k + shift_); }

std::int64_t PathView::index_of(double t) const { return aligned_index(t, base_->step()); }

PathView shift_path(const PathView& path, std::int64_t shift_steps) { return path.shifted(shift_steps); }

std::int64_t aligned_index(double t, double step) {
  const double q = t / step;
  const double k = std::nearbyint(q);
  if (!std::isfinite(q) || std::abs(q - k) > 1e-9 * std::max(1.0, std::abs(q))) {
    throw RangeError("time " + std::to_string(t) + " is not aligned with grid step " + std::to_string(step));
  }
  return static_cast<std::int64_t>(k);
}

HolderEstimate holder_seminorm(std::span<const double> values, double start, double step, double exponent) {
  if (!(exponent > 0.0 && exponent < 1.0)) throw DomainError("Holder exponent must lie in (0, 1)");
  check_step(step);
  const std::size_t n = values.size();
  if (n < 2) throw RangeError("Holder window must contain at least two samples");
  const TimeWindow window{start, start + static_cast<double>(n - 1) * step};
  double best = 0.0;
  const bool strided = n > kAllPairsLimit;
  auto scan_lag = [&](std::size_t lag) {
    const double denom = std::pow(static_cast<double>(lag) * step, exponent);
    double worst = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) worst = std::max(worst, std::abs(values[i + lag] - values[i]));
    best = std::max(best, worst / denom);
  };
  if (strided) {
    for (std::size_t lag = 1; lag < n; lag *= 2) scan_lag(lag);
  } else {
    for (std::size_t lag = 1; lag < n; ++lag) scan_lag(lag);
  }
  return {exponent, best, window, strided};
}

HolderEstimate holder_seminorm(const PathView& path, double exponent, TimeWindow window) {
  const std::int64_t k0 = path.index_of(window.begin);
  const std::int64_t k1 = path.index_of(window.end);
  if (k1 <= k0) throw RangeError("Holder window is empty");
  if (!path.covers(k0, k1)) throw RangeError("Holder window leaves the sampled path");
  std::vector<double> values(static_cast<std::size_t>(k1 - k0 + 1));
  for (std::int64_t k = k0; k <= k1; ++k) values[static_cast<std::size_t>(k - k0)] = path.at(k);
  auto est = holder_seminorm(values, path.base().time(k0), path.step(), exponent);
  est.window = window;
  return est;
}

std::vector<GrowthPoint> growth_ratio(const PathView& path) {
  std::vector<GrowthPoint> out;
  for (std::int64_t k = path.first_index(); k <= path.last_index(); ++k) {
    const double t = static_cast<double>(k) * path.step();
    if (std::abs(t) >= 1.0) out.push_back({t, std::abs(path.at(k)) / std::abs(t)});
  }
  return out;
}

}  // namespace fbmlab
