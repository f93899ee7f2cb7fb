#include "fbmlab/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "fbmlab/error.hpp"

namespace fbmlab::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* forced = std::getenv("FBMLAB_ISA")) {
    if (std::string(forced) == "scalar") return Isa::scalar;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw RangeError("kernel operands differ in length");
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

bool isa_supported(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) throw ConfigError("requested ISA is not supported by this CPU");
  current().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return active_isa() == Isa::avx2 ? avx2::dot(a.data(), b.data(), a.size())
                                   : scalar::dot(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> a) {
  return active_isa() == Isa::avx2 ? avx2::sum_squares(a.data(), a.size())
                                   : scalar::sum_squares(a.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return active_isa() == Isa::avx2 ? avx2::squared_distance(a.data(), b.data(), a.size())
                                   : scalar::squared_distance(a.data(), b.data(), a.size());
}

double min_squared_distance(std::span<const double> point, std::span<const double> cloud,
                            std::size_t dim) {
  if (dim == 0 || point.size() != dim || cloud.size() % dim != 0) {
    throw RangeError("cloud layout does not match point dimension");
  }
  const std::size_t rows = cloud.size() / dim;
  return active_isa() == Isa::avx2 ? avx2::min_squared_distance(point.data(), cloud.data(), rows, dim)
                                   : scalar::min_squared_distance(point.data(), cloud.data(), rows, dim);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size());
  if (active_isa() == Isa::avx2) {
    avx2::axpy(a, x.data(), y.data(), x.size());
  } else {
    scalar::axpy(a, x.data(), y.data(), x.size());
  }
}

void scale_into(double a, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size());
  if (active_isa() == Isa::avx2) {
    avx2::scale_into(a, x.data(), y.data(), x.size());
  } else {
    scalar::scale_into(a, x.data(), y.data(), x.size());
  }
}

void mul_add_pairs(std::span<const double> a, std::span<const double> b, std::span<const double> c,
                   std::span<const double> d, std::span<double> out) {
  check_sizes(a.size(), out.size());
  check_sizes(b.size(), out.size());
  check_sizes(c.size(), out.size());
  check_sizes(d.size(), out.size());
  if (active_isa() == Isa::avx2) {
    avx2::mul_add_pairs(a.data(), b.data(), c.data(), d.data(), out.data(), out.size());
  } else {
    scalar::mul_add_pairs(a.data(), b.data(), c.data(), d.data(), out.data(), out.size());
  }
}

}  // namespace fbmlab::kernels
