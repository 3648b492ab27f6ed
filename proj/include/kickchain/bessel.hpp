#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "kickchain/errors.hpp"

namespace kickchain {

inline constexpr int kBesselMaxOrder = 200;
inline constexpr double kBesselMaxArg = 1.0e3;

namespace detail {

// Ascending series sum_k (-1)^k (x/2)^{2k+n} / (k! (n+k)!), for x >= 0.
// Terms shrink monotonically once x^2/4 < n + 1, so this is used for small x.
inline double bessel_series(int n, double x) {
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  const double half = 0.5 * x;
  double term = std::exp(n * std::log(half) - std::lgamma(n + 1.0));
  double sum = term;
  const double q = -half * half;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * (n + k));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// J_0(x) .. J_{n_max}(x) for x > 0 by Miller's downward recurrence,
// normalized with J_0 + 2 sum_k J_{2k} = 1.
inline std::vector<double> bessel_miller(int n_max, double x) {
  const double top = std::max(static_cast<double>(n_max), x);
  int start = static_cast<int>(top + 20.0 + std::sqrt(60.0 * top));
  start += start % 2;
  std::vector<double> j(static_cast<std::size_t>(start + 2), 0.0);
  j[static_cast<std::size_t>(start + 1)] = 0.0;
  j[static_cast<std::size_t>(start)] = 1e-300;
  const double two_over_x = 2.0 / x;
  for (int k = start; k >= 1; --k) {
    const auto uk = static_cast<std::size_t>(k);
    j[uk - 1] = k * two_over_x * j[uk] - j[uk + 1];
    if (std::abs(j[uk - 1]) > 1e250) {
      for (std::size_t i = uk - 1; i < j.size(); ++i) j[i] *= 1e-250;
    }
  }
  double norm = j[0];
  for (int k = 2; k <= start; k += 2) norm += 2.0 * j[static_cast<std::size_t>(k)];
  j.resize(static_cast<std::size_t>(n_max + 1));
  for (auto& v : j) v /= norm;
  return j;
}

}  // namespace detail

// J_0(x), ..., J_{n_max}(x) for any real x. No order cap; orders far above |x|
// underflow to zero.
inline std::vector<double> bessel_j_sequence(int n_max, double x) {
  if (n_max < 0) throw DomainError("n_max must be nonnegative");
  if (!std::isfinite(x)) throw DomainError("Bessel argument must be finite");
  const double ax = std::abs(x);
  std::vector<double> out;
  if (ax <= 1.0) {
    out.resize(static_cast<std::size_t>(n_max + 1));
    for (int n = 0; n <= n_max; ++n) out[static_cast<std::size_t>(n)] = detail::bessel_series(n, ax);
  } else {
    out = detail::bessel_miller(n_max, ax);
  }
  if (x < 0)
    for (int n = 1; n <= n_max; n += 2) out[static_cast<std::size_t>(n)] = -out[static_cast<std::size_t>(n)];
  return out;
}

// Ordinary Bessel function of the first kind J_n(x), integer n.
inline double bessel_j(int order, double arg) {
  if (std::abs(order) > kBesselMaxOrder || !(std::abs(arg) <= kBesselMaxArg))
    throw DomainError("bessel_j supports |order| <= 200 and |arg| <= 1000");
  const int n = std::abs(order);
  const double ax = std::abs(arg);
  double v = ax <= 1.0 ? detail::bessel_series(n, ax) : detail::bessel_miller(n, ax)[static_cast<std::size_t>(n)];
  // J_{-n} = (-1)^n J_n and J_n(-x) = (-1)^n J_n(x).
  const bool odd = (n % 2) == 1;
  if (odd && order < 0) v = -v;
  if (odd && arg < 0) v = -v;
  return v;
}

}  // namespace kickchain
