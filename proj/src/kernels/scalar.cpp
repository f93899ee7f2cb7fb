#include "fbmlab/kernels.hpp"

#include <limits>

namespace fbmlab::kernels::scalar {

// Four independent partial sums, combined as (s0 + s1) + (s2 + s3). The AVX2
// variant keeps the same lane structure, so both usually agree bitwise.

double dot(const double* a, const double* b, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) s[l] += a[i + l] * b[i + l];
  }
  double total = (s[0] + s[2]) + (s[1] + s[3]);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

double sum_squares(const double* a, std::size_t n) { return dot(a, a, n); }

double squared_distance(const double* a, const double* b, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double d = a[i + l] - b[i + l];
      s[l] += d * d;
    }
  }
  double total = (s[0] + s[2]) + (s[1] + s[3]);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

double min_squared_distance(const double* p, const double* cloud, std::size_t rows, std::size_t dim) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < rows; ++r) {
    const double d = squared_distance(p, cloud + r * dim, dim);
    if (d < best) best = d;
  }
  return best;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_into(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i];
}

void mul_add_pairs(const double* a, const double* b, const double* c, const double* d, double* out,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ab = a[i] * b[i];
    const double cd = c[i] * d[i];
    out[i] = ab + cd;
  }
}

}  // namespace fbmlab::kernels::scalar
