#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "kickchain/cosine_transform.hpp"
#include "kickchain/errors.hpp"
#include "kickchain/params.hpp"
#include "kickchain/spin_state.hpp"

namespace kickchain {

// Normalization a_m of the m-th open-chain eigenmode (m is 1-based).
inline double mode_norm(int m, int n_sites) {
  return std::sqrt((m == 1 ? 1.0 : 2.0) / n_sites);
}

// Entry (m, j) of the orthogonal eigenmode matrix, both indices 1-based.
inline double mode_entry(int m, int j, int n_sites) {
  const double arg = std::numbers::pi / (2.0 * n_sites) * (m - 1) * (2.0 * j - 1);
  return mode_norm(m, n_sites) * std::cos(arg);
}

// Eigenmodes of the open Heisenberg chain in the one-excitation sector and
// their phases per pulse period, phi_m = beta [1 - cos(pi (m-1) / N)].
//
// The mode matrix itself is only materialized on request; the evolution path
// goes through the fast cosine transform.
class EigenBasis {
 public:
  explicit EigenBasis(const ChainParams& p) : n_(p.n_sites) {
    p.validate();
    if (p.boundary != Boundary::open)
      throw ConfigError("eigenbasis is defined for the open chain; use the ring propagator",
                        "boundary");
    if (p.n_sites < 2) throw DomainError("eigenbasis needs at least two sites");
    phases_.resize(static_cast<std::size_t>(n_));
    for (int m = 1; m <= n_; ++m)
      phases_[static_cast<std::size_t>(m - 1)] =
          p.beta * (1.0 - std::cos(std::numbers::pi * (m - 1) / n_));
    transform_ = std::make_shared<const CosineTransform>(n_);
  }

  int size() const noexcept { return n_; }

  // Phase accumulated by mode m (index m-1) in one period.
  const std::vector<double>& eigenphases() const noexcept { return phases_; }

  // Rows are modes, columns are sites.
  Eigen::MatrixXd mode_vectors() const {
    Eigen::MatrixXd g(n_, n_);
    for (int m = 1; m <= n_; ++m)
      for (int j = 1; j <= n_; ++j) g(m - 1, j - 1) = mode_entry(m, j, n_);
    return g;
  }

  // Single eigenmode m (1-based) as a site-basis state.
  SpinState mode_state(int m) const {
    if (m < 1 || m > n_) throw DomainError("mode index outside basis");
    std::vector<cplx> a(static_cast<std::size_t>(n_));
    for (int j = 1; j <= n_; ++j) a[static_cast<std::size_t>(j - 1)] = mode_entry(m, j, n_);
    return SpinState(std::move(a));
  }

  std::vector<cplx> to_modes(const SpinState& s) const {
    if (s.size() != n_) throw DimensionError("state length does not match eigenbasis");
    std::vector<cplx> c(static_cast<std::size_t>(n_));
    transform_->forward(s.amplitudes(), c);
    return c;
  }

  SpinState from_modes(std::span<const cplx> c) const {
    if (static_cast<int>(c.size()) != n_)
      throw DimensionError("mode vector length does not match eigenbasis");
    std::vector<cplx> a(static_cast<std::size_t>(n_));
    transform_->inverse(c, a);
    return SpinState(std::move(a));
  }

 private:
  int n_;
  std::vector<double> phases_;
  std::shared_ptr<const CosineTransform> transform_;
};

inline EigenBasis build_eigenbasis(const ChainParams& p) { return EigenBasis(p); }

}  // namespace kickchain
