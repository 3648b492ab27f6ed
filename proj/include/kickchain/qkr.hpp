#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "kickchain/bessel.hpp"
#include "kickchain/chain.hpp"
#include "kickchain/errors.hpp"
#include "kickchain/params.hpp"

namespace kickchain {

// Truncated plane-wave basis of the kicked rotor.
struct RotorBasis {
  int size = 0;               // M
  double hbar = 1.0;
  double kick_strength = 0;   // K
  bool periodic = false;      // index separations taken modulo `size` (ring geometry)

  double beta() const { return kick_strength / hbar; }

  static RotorBasis matching(const ChainParams& p) {
    if (!(p.b_q > 0)) throw DomainError("rotor correspondence needs b_q > 0");
    return {p.n_sites, p.b_q, p.beta * p.b_q, p.boundary == Boundary::ring};
  }
};

// i^n for integer n.
inline std::complex<double> i_pow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Kick part of the rotor propagator, <r| exp(i beta cos x) |s> = i^{r-s} J_{r-s}(beta).
// Toeplitz; J_{-n} = (-1)^n J_n makes it symmetric. A periodic basis uses the
// nearest-image separation, giving the circulant form; images further out
// contribute J_{|d| + M}, which is dropped.
inline Eigen::MatrixXcd qkr_kick_matrix(const RotorBasis& basis) {
  if (basis.size < 1) throw DomainError("rotor basis size must be positive");
  if (!(basis.hbar > 0)) throw DomainError("rotor hbar must be positive");
  const int m = basis.size;
  const auto j = bessel_j_sequence(m - 1, basis.beta());
  Eigen::MatrixXcd k(m, m);
  for (int r = 0; r < m; ++r)
    for (int s = 0; s < m; ++s) {
      int d = r - s;
      if (basis.periodic) {
        d = ((d % m) + m) % m;
        if (d > m / 2) d -= m;
      }
      k(r, s) = i_pow(std::abs(d)) * j[static_cast<std::size_t>(std::abs(d))];
    }
  return k;
}

struct QuadratureResult {
  std::complex<double> value;
  double error_estimate = 0;  // |I(n) - I(n/2)|
  bool converged = false;
};

// Continuum limit of <r|U_hc(T0)|s>:
//   F_rs = e^{-i beta} / pi * int_0^pi [cos((r+s-1)x) + cos((r-s)x)] e^{i beta cos x} dx,
// normalized so that F = identity at beta = 0. The integrand extends to an
// even 2pi-periodic function, so the trapezoid rule converges spectrally;
// convergence is judged by comparing against half the panel count.
inline QuadratureResult frs_quadrature(Site r, Site s, const ChainParams& p, int panels = 1 << 14,
                                       double tolerance = 1e-9) {
  p.validate();
  if (panels < 2 || panels % 2 != 0) throw DomainError("panel count must be even and >= 2");
  const int sum_order = r + s - 1;
  const int diff_order = r - s;
  auto trapezoid = [&](int n) {
    const double h = std::numbers::pi / n;
    std::complex<double> acc = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double x = k * h;
      const double w = (k == 0 || k == n) ? 0.5 : 1.0;
      const double c = std::cos(sum_order * x) + std::cos(diff_order * x);
      acc += w * c * std::polar(1.0, p.beta * std::cos(x));
    }
    return acc * h;
  };
  const auto fine = trapezoid(panels);
  const auto coarse = trapezoid(panels / 2);
  const auto prefactor = std::polar(1.0 / std::numbers::pi, -p.beta);
  QuadratureResult out;
  out.value = prefactor * fine;
  out.error_estimate = std::abs(prefactor * (fine - coarse));
  out.converged = out.error_estimate <= tolerance;
  return out;
}

struct PhasePoint {
  double angle = 0;     // in [0, 2pi)
  double momentum = 0;
};

inline double wrap_angle(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(x, two_pi);
  if (w < 0) w += two_pi;
  if (w >= two_pi) w = 0.0;
  return w;
}

// Chirikov standard map: p' = p + K sin x, x' = x + p' (mod 2pi).
inline PhasePoint standard_map_step(PhasePoint pt, double k) {
  const double p = pt.momentum + k * std::sin(pt.angle);
  return {wrap_angle(pt.angle + p), p};
}

// Worker count for ensemble and sweep parallelism, from KICKCHAIN_THREADS.
inline unsigned worker_threads() {
  if (const char* env = std::getenv("KICKCHAIN_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct ClassicalDiffusion {
  double rate = 0;                     // slope of <(p - p0)^2> per step
  std::vector<double> mean_square;     // <(p - p0)^2> at steps 0..steps
  bool below_chaos_threshold = false;  // K < 4
};

namespace detail {

inline double member_angle(std::uint64_t seed, std::uint64_t member) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(member), static_cast<std::uint32_t>(member >> 32)};
  std::mt19937_64 rng(seq);
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * std::numbers::pi * u;
}

inline double least_squares_slope(const std::vector<double>& t, const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
  }
  const double mt = st / n, my = sy / n;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    num += (t[i] - mt) * (y[i] - my);
    den += (t[i] - mt) * (t[i] - mt);
  }
  return den > 0 ? num / den : 0.0;
}

}  // namespace detail

// Momentum diffusion rate of the standard map, estimated from an ensemble
// with uniform random angles and zero initial momentum. Member i draws its
// angle from a stream keyed by (seed, i) and partial sums are reduced in a
// fixed chunk order, so the result does not depend on the thread count.
inline ClassicalDiffusion classical_diffusion(double k, int ensemble, int steps, std::uint64_t seed,
                                              unsigned threads = worker_threads()) {
  if (ensemble < 1) throw DomainError("ensemble must be positive");
  if (steps < 1) throw DomainError("steps must be positive");
  constexpr int chunk = 1024;
  const int n_chunks = (ensemble + chunk - 1) / chunk;
  const auto width = static_cast<std::size_t>(steps + 1);
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(n_chunks),
                                           std::vector<double>(width, 0.0));
  auto run_chunk = [&](int c) {
    auto& acc = partial[static_cast<std::size_t>(c)];
    const int end = std::min(ensemble, (c + 1) * chunk);
    for (int i = c * chunk; i < end; ++i) {
      PhasePoint pt{detail::member_angle(seed, static_cast<std::uint64_t>(i)), 0.0};
      for (int t = 1; t <= steps; ++t) {
        pt = standard_map_step(pt, k);
        acc[static_cast<std::size_t>(t)] += pt.momentum * pt.momentum;
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_chunks)));
  if (workers == 1) {
    for (int c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int c = static_cast<int>(w); c < n_chunks; c += static_cast<int>(workers)) run_chunk(c);
      });
  }
  ClassicalDiffusion out;
  out.mean_square.assign(width, 0.0);
  for (const auto& acc : partial)
    for (std::size_t t = 0; t < width; ++t) out.mean_square[t] += acc[t];
  std::vector<double> t_axis(width);
  for (std::size_t t = 0; t < width; ++t) {
    out.mean_square[t] /= ensemble;
    t_axis[t] = static_cast<double>(t);
  }
  out.rate = detail::least_squares_slope(t_axis, out.mean_square);
  out.below_chaos_threshold = k < 4.0;
  return out;
}

// Classical diffusion rate with the leading short-time correlation terms,
// D(K) = K^2/2 {1 - 2 J_2(K) + 2 J_2(K)^2}.
inline double rechester_d(double k) {
  if (!(k > 0)) throw DomainError("rechester_d needs K > 0");
  const double j2 = bessel_j_sequence(2, k)[2];
  return 0.5 * k * k * (1.0 - 2.0 * j2 + 2.0 * j2 * j2);
}

struct AcceleratorWindow {
  double alpha = 0;
  bool inside = false;
};

inline constexpr double kAcceleratorAlphaMin = 1.03;
inline constexpr double kAcceleratorAlphaMax = 1.10;

// Accelerator modes are stable for K / 2pi in [1.03, 1.10], endpoints included.
inline AcceleratorWindow accelerator_window(double k) {
  if (!(k > 0)) throw DomainError("accelerator_window needs K > 0");
  const double alpha = k / (2.0 * std::numbers::pi);
  constexpr double eps = 1e-12;  // rounding in K = 2 pi alpha
  return {alpha, alpha >= kAcceleratorAlphaMin - eps && alpha <= kAcceleratorAlphaMax + eps};
}

}  // namespace kickchain
