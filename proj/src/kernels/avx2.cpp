#include "fbmlab/kernels.hpp"

#include <limits>

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace fbmlab::kernels::avx2 {

#if defined(__AVX2__)

namespace {

// Lane order matches the scalar reference: (l0 + l2) + (l1 + l3).
inline double reduce(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(pair) + _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, prod);
  }
  double total = reduce(acc);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

double sum_squares(const double* a, std::size_t n) { return dot(a, a, n); }

double squared_distance(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double total = reduce(acc);
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
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_into(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = a * x[i];
}

void mul_add_pairs(const double* a, const double* b, const double* c, const double* d, double* out,
                   std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d cd = _mm256_mul_pd(_mm256_loadu_pd(c + i), _mm256_loadu_pd(d + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(ab, cd));
  }
  for (; i < n; ++i) {
    const double ab = a[i] * b[i];
    const double cd = c[i] * d[i];
    out[i] = ab + cd;
  }
}

#else  // no AVX2 in this build: the variant forwards to the reference

double dot(const double* a, const double* b, std::size_t n) { return scalar::dot(a, b, n); }
double sum_squares(const double* a, std::size_t n) { return scalar::sum_squares(a, n); }
double squared_distance(const double* a, const double* b, std::size_t n) {
  return scalar::squared_distance(a, b, n);
}
double min_squared_distance(const double* p, const double* cloud, std::size_t rows, std::size_t dim) {
  return scalar::min_squared_distance(p, cloud, rows, dim);
}
void axpy(double a, const double* x, double* y, std::size_t n) { scalar::axpy(a, x, y, n); }
void scale_into(double a, const double* x, double* y, std::size_t n) { scalar::scale_into(a, x, y, n); }
void mul_add_pairs(const double* a, const double* b, const double* c, const double* d, double* out,
                   std::size_t n) {
  scalar::mul_add_pairs(a, b, c, d, out, n);
}

#endif

}  // namespace fbmlab::kernels::avx2
