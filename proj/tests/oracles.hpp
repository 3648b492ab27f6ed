#pragma once

// Independent reference computations used only by the test suites.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "kickchain/spin_state.hpp"

namespace kickchain::oracle {

// exp(-i t H) by Eigen's scaling-and-squaring Pade exponential.
inline Eigen::MatrixXcd expm_propagator(const Eigen::MatrixXd& h, double t) {
  const Eigen::MatrixXcd a = std::complex<double>(0.0, -t) * h.cast<std::complex<double>>();
  return a.exp();
}

// Removes the global phase of `a` relative to `b` using their largest entry.
inline Eigen::MatrixXcd align_global_phase(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::Index r = 0, c = 0;
  b.cwiseAbs().maxCoeff(&r, &c);
  const auto ph = b(r, c) / a(r, c);
  return a * (ph / std::abs(ph));
}

// Power series of J_n(x) in long double; reliable for moderate x.
inline double bessel_series(int n, double x) {
  long double half = 0.5L * x;
  long double term = 1.0L;
  for (int k = 1; k <= n; ++k) term *= half / k;
  long double sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= -half * half / (static_cast<long double>(k) * (n + k));
    sum += term;
    if (std::fabs(term) < 1e-30L) break;
  }
  return static_cast<double>(sum);
}

inline SpinState random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<std::complex<double>> a(static_cast<std::size_t>(n));
  for (auto& v : a) v = {g(rng), g(rng)};
  return SpinState(std::move(a)).normalize();
}

// Applies a dense matrix to a state.
inline SpinState apply(const Eigen::MatrixXcd& m, const SpinState& s) {
  const auto a = s.amplitudes();
  Eigen::Map<const Eigen::VectorXcd> v(a.data(), static_cast<Eigen::Index>(a.size()));
  Eigen::VectorXcd out = m * v;
  return SpinState(std::vector<std::complex<double>>(out.data(), out.data() + out.size()));
}

}  // namespace kickchain::oracle
