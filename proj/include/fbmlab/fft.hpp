#pragma once

// Thin RAII wrappers over FFTW. Plans are created under a process-wide lock
// (FFTW's planner is not reentrant) with FFTW_ESTIMATE so that the chosen
// algorithm, and therefore every output bit, is reproducible. Execution is
// reentrant: callers pass their own buffers.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace fbmlab::fft {

/// Unnormalized complex DFT of fixed length: out_k = sum_j in_j e^{-2 pi i jk/n}.
class ComplexForward {
 public:
  explicit ComplexForward(std::size_t n);
  ~ComplexForward();
  ComplexForward(const ComplexForward&) = delete;
  ComplexForward& operator=(const ComplexForward&) = delete;

  std::size_t size() const { return n_; }
  void execute(std::span<std::complex<double>> in, std::span<std::complex<double>> out) const;

 private:
  std::size_t n_;
  void* plan_;
};

/// Square 2-D real transforms on an m x m grid (row-major, index [j1*m + j2]).
/// Spectral layout is m x (m/2 + 1); forward is unnormalized, backward computes
/// the plain trigonometric sum.
class Real2d {
 public:
  explicit Real2d(std::size_t m);
  ~Real2d();
  Real2d(const Real2d&) = delete;
  Real2d& operator=(const Real2d&) = delete;

  std::size_t grid() const { return m_; }
  std::size_t spectral_size() const { return m_ * (m_ / 2 + 1); }

  void forward(std::span<double> real_in, std::span<std::complex<double>> spec_out) const;
  /// Destroys `spec_in`.
  void backward(std::span<std::complex<double>> spec_in, std::span<double> real_out) const;

 private:
  std::size_t m_;
  void* forward_plan_;
  void* backward_plan_;
};

}  // namespace fbmlab::fft
