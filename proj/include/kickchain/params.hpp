#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "kickchain/errors.hpp"

namespace kickchain {

enum class Boundary { open, ring };

inline std::string_view to_string(Boundary b) {
  return b == Boundary::open ? "open" : "ring";
}

// Sites are numbered 1..n_sites throughout the public API.
using Site = int;

// Geometry and control constants of the pulsed chain, in units where the
// dynamics depend only on beta = 2 J T0 and the pulse strength b_q.
struct ChainParams {
  int n_sites = 1401;
  Site center = 701;
  double beta = 100.0;
  double b_q = 1.0 / 15.0;
  Boundary boundary = Boundary::open;

  void validate() const {
    if (n_sites < 1) throw ConfigError("n_sites must be positive", "n_sites");
    if (center < 1 || center > n_sites)
      throw ConfigError("center must lie in [1, n_sites]", "center");
    if (!std::isfinite(beta) || beta < 0.0)
      throw ConfigError("beta must be finite and nonnegative", "beta");
    if (!std::isfinite(b_q) || b_q < 0.0)
      throw ConfigError("b_q must be finite and nonnegative", "b_q");
    if (!std::isfinite(beta * b_q))
      throw ConfigError("beta * b_q overflows", "beta");
  }

  friend bool operator==(const ChainParams&, const ChainParams&) = default;
};

struct DerivedParams {
  double k_s = 0;                  // stochasticity parameter beta * b_q
  double hbar_eff = 0;             // = b_q
  double alpha = 0;                // k_s / 2pi
  double hop_distance = 0;         // sites travelled per period by an accelerator mode
  double localization_length = 0;  // beta^2 / 4
  double break_time = 0;           // (k_s / b_q)^2, order-of-magnitude estimate
};

inline DerivedParams derived_params(const ChainParams& p) {
  p.validate();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  DerivedParams d;
  d.k_s = p.beta * p.b_q;
  d.hbar_eff = p.b_q;
  d.alpha = d.k_s / two_pi;
  d.hop_distance = p.b_q > 0 ? two_pi / p.b_q : INFINITY;
  d.localization_length = p.beta * p.beta / 4.0;
  d.break_time = p.beta * p.beta;
  return d;
}

}  // namespace kickchain
