#pragma once

// Statistical oracles shared by the unit and acceptance tests.

#include <cstddef>
#include <span>
#include <vector>

namespace fbmlab::testing {

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
/// Standard error of the mean.
double standard_error(std::span<const double> x);

/// (1/(n-k)) sum x_i x_{i+k}, for a known zero-mean series.
double autocovariance(std::span<const double> x, std::size_t lag);

struct KsResult {
  double statistic;
  double p_value;
};

/// Two-sample Kolmogorov-Smirnov test; p-value from the Kolmogorov
/// distribution with Stephens' small-sample correction.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 lambda^2}.
double kolmogorov_q(double lambda);

/// Least-squares slope of log2 err against log2 step (the observed order).
double observed_order(std::span<const double> steps, std::span<const double> errors);

}  // namespace fbmlab::testing
