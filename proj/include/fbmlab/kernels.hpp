#pragma once

// Data-parallel inner loops shared by the models, the solver and the
// attractor layer. Every kernel has a scalar reference implementation and an
// AVX2 variant; the variant is chosen once per process from the CPU flags
// (override with FBMLAB_ISA=scalar). Elementwise kernels produce bitwise
// identical results across variants; reductions agree to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace fbmlab::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// ISA used by the dispatched entry points below.
Isa active_isa();

/// True when the running CPU can execute the given variant.
bool isa_supported(Isa isa);

/// Pin the dispatch table (tests and benchmarks). Throws if unsupported.
void set_active_isa(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Smallest squared distance from `point` to the rows of a row-major cloud.
double min_squared_distance(std::span<const double> point, std::span<const double> cloud,
                            std::size_t dim);

/// y += a*x
void axpy(double a, std::span<const double> x, std::span<double> y);
/// y = a*x
void scale_into(double a, std::span<const double> x, std::span<double> y);
/// out = a∘b + c∘d (no fused multiply-add)
void mul_add_pairs(std::span<const double> a, std::span<const double> b, std::span<const double> c,
                   std::span<const double> d, std::span<double> out);

// Fixed variants, used for equivalence testing.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum_squares(const double* a, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
double min_squared_distance(const double* p, const double* cloud, std::size_t rows, std::size_t dim);
void axpy(double a, const double* x, double* y, std::size_t n);
void scale_into(double a, const double* x, double* y, std::size_t n);
void mul_add_pairs(const double* a, const double* b, const double* c, const double* d, double* out,
                   std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum_squares(const double* a, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
double min_squared_distance(const double* p, const double* cloud, std::size_t rows, std::size_t dim);
void axpy(double a, const double* x, double* y, std::size_t n);
void scale_into(double a, const double* x, double* y, std::size_t n);
void mul_add_pairs(const double* a, const double* b, const double* c, const double* d, double* out,
                   std::size_t n);
}  // namespace avx2

}  // namespace fbmlab::kernels
