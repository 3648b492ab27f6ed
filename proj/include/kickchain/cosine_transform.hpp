#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "kickchain/errors.hpp"

namespace kickchain {

namespace detail {

// FFTW's planner is not reentrant; execution of an existing plan is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(double* p) const noexcept { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<double, FftwFree>;

inline FftwBuffer fftw_buffer(std::size_t n) {
  auto* p = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer(p);
}

}  // namespace detail

// Orthonormal cosine transform of the open-chain eigenmodes:
//
//   forward:  c_m = a_m sum_j cos[pi (m-1)(2j-1) / 2N] psi_j
//   inverse:  psi_j = sum_m a_m cos[pi (m-1)(2j-1) / 2N] c_m
//
// with a_1 = 1/sqrt(N), a_m = sqrt(2/N). This is the scaled DCT-II / DCT-III
// pair, evaluated in O(N log N) through FFTW. Complex input is transformed
// as two real vectors.
class CosineTransform {
 public:
  explicit CosineTransform(int n) : n_(n) {
    if (n < 1) throw DomainError("cosine transform size must be positive");
    auto in = detail::fftw_buffer(static_cast<std::size_t>(n));
    auto out = detail::fftw_buffer(static_cast<std::size_t>(n));
    std::lock_guard lock(detail::fftw_planner_mutex());
    forward_ = fftw_plan_r2r_1d(n, in.get(), out.get(), FFTW_REDFT10, FFTW_ESTIMATE);
    inverse_ = fftw_plan_r2r_1d(n, in.get(), out.get(), FFTW_REDFT01, FFTW_ESTIMATE);
    if (forward_ == nullptr || inverse_ == nullptr) {
      destroy_unlocked();
      throw Error("FFTW failed to create a cosine transform plan");
    }
  }

  CosineTransform(const CosineTransform&) = delete;
  CosineTransform& operator=(const CosineTransform&) = delete;

  ~CosineTransform() { destroy(); }

  int size() const noexcept { return n_; }

  void forward(std::span<const std::complex<double>> psi,
               std::span<std::complex<double>> modes) const {
    check(psi.size(), modes.size());
    const auto n = static_cast<std::size_t>(n_);
    auto in = detail::fftw_buffer(n);
    auto re = detail::fftw_buffer(n);
    auto im = detail::fftw_buffer(n);
    for (std::size_t j = 0; j < n; ++j) in.get()[j] = psi[j].real();
    fftw_execute_r2r(forward_, in.get(), re.get());
    for (std::size_t j = 0; j < n; ++j) in.get()[j] = psi[j].imag();
    fftw_execute_r2r(forward_, in.get(), im.get());
    // REDFT10 returns 2 * sum_j x_j cos(pi k (j + 1/2) / N).
    const double a0 = 0.5 / std::sqrt(static_cast<double>(n_));
    const double ak = 0.5 * std::sqrt(2.0 / n_);
    for (std::size_t k = 0; k < n; ++k) {
      const double a = k == 0 ? a0 : ak;
      modes[k] = {a * re.get()[k], a * im.get()[k]};
    }
  }

  void inverse(std::span<const std::complex<double>> modes,
               std::span<std::complex<double>> psi) const {
    check(modes.size(), psi.size());
    const auto n = static_cast<std::size_t>(n_);
    auto in = detail::fftw_buffer(n);
    auto re = detail::fftw_buffer(n);
    auto im = detail::fftw_buffer(n);
    // REDFT01 computes X_0 + 2 sum_{k>0} X_k cos(pi k (j + 1/2) / N).
    const double a0 = 1.0 / std::sqrt(static_cast<double>(n_));
    const double ak = 0.5 * std::sqrt(2.0 / n_);
    for (std::size_t k = 0; k < n; ++k) in.get()[k] = (k == 0 ? a0 : ak) * modes[k].real();
    fftw_execute_r2r(inverse_, in.get(), re.get());
    for (std::size_t k = 0; k < n; ++k) in.get()[k] = (k == 0 ? a0 : ak) * modes[k].imag();
    fftw_execute_r2r(inverse_, in.get(), im.get());
    for (std::size_t j = 0; j < n; ++j) psi[j] = {re.get()[j], im.get()[j]};
  }

 private:
  void check(std::size_t a, std::size_t b) const {
    if (a != static_cast<std::size_t>(n_) || b != static_cast<std::size_t>(n_))
      throw DimensionError("cosine transform length mismatch");
  }

  void destroy() noexcept {
    std::lock_guard lock(detail::fftw_planner_mutex());
    destroy_unlocked();
  }

  void destroy_unlocked() noexcept {
    if (forward_ != nullptr) fftw_destroy_plan(forward_);
    if (inverse_ != nullptr) fftw_destroy_plan(inverse_);
    forward_ = inverse_ = nullptr;
  }

  int n_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace kickchain
