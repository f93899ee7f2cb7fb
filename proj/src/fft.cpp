#include "fbmlab/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "fbmlab/error.hpp"

namespace fbmlab::fft {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

}  // namespace

ComplexForward::ComplexForward(std::size_t n) : n_(n), plan_(nullptr) {
  if (n == 0) throw RangeError("FFT length must be positive");
  std::vector<std::complex<double>> in(n), out(n);
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(in.data()), as_fftw(out.data()), FFTW_FORWARD,
                           kFlags);
  if (plan_ == nullptr) throw NumericalError("FFTW could not create a 1-D plan");
}

ComplexForward::~ComplexForward() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void ComplexForward::execute(std::span<std::complex<double>> in, std::span<std::complex<double>> out) const {
  if (in.size() != n_ || out.size() != n_) throw RangeError("FFT buffer length mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(plan_), as_fftw(in.data()), as_fftw(out.data()));
}

Real2d::Real2d(std::size_t m) : m_(m), forward_plan_(nullptr), backward_plan_(nullptr) {
  if (m < 2 || m % 2 != 0) throw RangeError("2-D real FFT grid must be even and >= 2");
  std::vector<double> real(m * m);
  std::vector<std::complex<double>> spec(spectral_size());
  const int n = static_cast<int>(m);
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_r2c_2d(n, n, real.data(), as_fftw(spec.data()), kFlags);
  backward_plan_ = fftw_plan_dft_c2r_2d(n, n, as_fftw(spec.data()), real.data(), kFlags);
  if (forward_plan_ == nullptr || backward_plan_ == nullptr) {
    throw NumericalError("FFTW could not create a 2-D plan");
  }
}

Real2d::~Real2d() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void Real2d::forward(std::span<double> real_in, std::span<std::complex<double>> spec_out) const {
  if (real_in.size() != m_ * m_ || spec_out.size() != spectral_size()) {
    throw RangeError("FFT buffer length mismatch");
  }
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), real_in.data(), as_fftw(spec_out.data()));
}

void Real2d::backward(std::span<std::complex<double>> spec_in, std::span<double> real_out) const {
  if (real_out.size() != m_ * m_ || spec_in.size() != spectral_size()) {
    throw RangeError("FFT buffer length mismatch");
  }
  fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_plan_), as_fftw(spec_in.data()), real_out.data());
}

}  // namespace fbmlab::fft
