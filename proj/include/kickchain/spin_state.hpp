#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "kickchain/errors.hpp"
#include "kickchain/params.hpp"

namespace kickchain {

using cplx = std::complex<double>;

// Amplitudes of a single spin excitation over the site basis |1>..|N>.
// Index 0 of `amplitudes()` is site 1.
class SpinState {
 public:
  SpinState() = default;
  explicit SpinState(std::vector<cplx> amplitudes) : amp_(std::move(amplitudes)) {}

  static SpinState basis(int n_sites, Site s) {
    if (s < 1 || s > n_sites) throw DomainError("basis site outside chain");
    std::vector<cplx> a(static_cast<std::size_t>(n_sites));
    a[static_cast<std::size_t>(s - 1)] = 1.0;
    return SpinState(std::move(a));
  }

  int size() const noexcept { return static_cast<int>(amp_.size()); }
  std::span<const cplx> amplitudes() const noexcept { return amp_; }
  std::span<cplx> amplitudes() noexcept { return amp_; }

  const cplx& at(Site s) const { return amp_.at(static_cast<std::size_t>(s - 1)); }
  cplx& at(Site s) { return amp_.at(static_cast<std::size_t>(s - 1)); }

  double norm_squared() const noexcept {
    double acc = 0.0;
    for (const auto& a : amp_) acc += std::norm(a);
    return acc;
  }

  // Rescales to unit norm; throws on the zero vector.
  SpinState& normalize() {
    const double n = std::sqrt(norm_squared());
    if (!(n > 0.0)) throw DomainError("cannot normalize a zero state");
    for (auto& a : amp_) a /= n;
    return *this;
  }

  friend bool operator==(const SpinState&, const SpinState&) = default;

 private:
  std::vector<cplx> amp_;
};

// <a|b>
inline cplx inner(const SpinState& a, const SpinState& b) {
  if (a.size() != b.size()) throw DimensionError("inner product of states of different length");
  cplx acc = 0.0;
  auto x = a.amplitudes();
  auto y = b.amplitudes();
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

inline double max_abs_diff(const SpinState& a, const SpinState& b) {
  if (a.size() != b.size()) throw DimensionError("state length mismatch");
  double m = 0.0;
  auto x = a.amplitudes();
  auto y = b.amplitudes();
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace kickchain
