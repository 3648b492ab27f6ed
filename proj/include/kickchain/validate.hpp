#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "kickchain/chain.hpp"
#include "kickchain/eigenbasis.hpp"
#include "kickchain/observables.hpp"
#include "kickchain/qkr.hpp"

namespace kickchain {

struct ValidationCheck {
  std::string name;
  double deviation = 0;
  double tolerance = 0;
  bool passed = false;
  double seconds = 0;
  bool timing = false;  // deviation is a wall-clock time, not reproducible
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

struct ValidationOptions {
  // Flip the sign of the kick phase on the transform path only. Used to show
  // that the suite notices a broken engine.
  bool inject_kick_sign_error = false;
};

// Fig. 1 leading-peak hop over 6 pulses: deviation of the fitted per-period
// advance from 2 pi / B_Q, in sites.
struct HopMeasurement {
  double advance = 0;
  double worst_peak_offset = 0;  // largest |peak - expected| over pulses 1..6
};

namespace detail {

inline double timed(const std::function<void()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline Eigen::MatrixXcd brute_propagator(const ChainParams& p) {
  const Eigen::MatrixXcd a = std::complex<double>(0.0, -1.0) * oracle_hamiltonian(p).cast<std::complex<double>>();
  return a.exp();
}

inline double phase_aligned_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::Index r = 0, c = 0;
  b.cwiseAbs().maxCoeff(&r, &c);
  const auto ph = b(r, c) / a(r, c);
  return (a * (ph / std::abs(ph)) - b).cwiseAbs().maxCoeff();
}

// Transform-path stepper, optionally with the kick sign flipped.
inline SpinState harness_step(const SpinState& psi, const FloquetContext& ctx, bool flipped) {
  if (!flipped) return step_period(psi, ctx);
  return apply_kick(apply_uhc(psi, *ctx.basis(), 1.0), ctx.params(), -1.0);
}

}  // namespace detail

// Leading-edge peak of each half of the chain, fitted like a packet centre.
inline HopMeasurement measure_fig1_hop(bool flipped_kick = false) {
  const ChainParams p;
  const FloquetContext ctx(p, Engine::transform);
  const double hop = 2.0 * std::numbers::pi / p.b_q;
  SpinState psi = SpinState::basis(p.n_sites, p.center);
  std::vector<double> j, sep;
  HopMeasurement out;
  for (int pulse = 1; pulse <= 6; ++pulse) {
    psi = detail::harness_step(psi, ctx, flipped_kick);
    const auto r = detect_accelerator_modes(psi, pulse, p, 0.0);
    if (r.modes.size() != 2) {
      out.worst_peak_offset = INFINITY;
      continue;
    }
    for (const auto& m : r.modes) {
      const double expected = p.center + (m.position < p.center ? -1.0 : 1.0) * hop * pulse;
      out.worst_peak_offset = std::max(out.worst_peak_offset, std::abs(m.position - expected));
    }
    j.push_back(pulse);
    sep.push_back(0.5 * (r.modes[1].position - r.modes[0].position));
  }
  out.advance = j.size() >= 2 ? detail::fit_line(j, sep).slope : NAN;
  return out;
}

// Cross-checks every analytic result against an independent computation.
inline ValidationReport validate_suite(const ValidationOptions& opt = {}) {
  ValidationReport rep;
  auto add = [&](std::string name, double tol, const std::function<double()>& f) {
    ValidationCheck c;
    c.name = std::move(name);
    c.tolerance = tol;
    c.seconds = detail::timed([&] { c.deviation = f(); });
    c.passed = std::isfinite(c.deviation) && c.deviation <= tol;
    rep.checks.push_back(c);
  };
  auto chain = [](int n, double beta, double b_q, Boundary b = Boundary::open) {
    ChainParams p;
    p.n_sites = n;
    p.center = (n + 1) / 2;
    p.beta = beta;
    p.b_q = b_q;
    p.boundary = b;
    return p;
  };

  const auto t0 = std::chrono::steady_clock::now();
  add("eigenbasis_vs_diagonalization", 1e-10, [&] {
    const auto p = chain(64, 10.0, 0.1);
    const EigenBasis basis(p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle_hamiltonian(p));
    const auto& phi = basis.eigenphases();
    const double shift = es.eigenvalues()(0) - phi[0];
    double dev = 0;
    const auto modes = basis.mode_vectors();
    for (int m = 0; m < 64; ++m) {
      dev = std::max(dev, std::abs(es.eigenvalues()(m) - shift - phi[static_cast<std::size_t>(m)]));
      // Non-degenerate spectrum: eigenvectors agree up to sign.
      const double overlap = std::abs(modes.row(m).dot(es.eigenvectors().col(m)));
      dev = std::max(dev, std::abs(overlap - 1.0));
    }
    return dev;
  });
  add("propagator_vs_matrix_exponential", 1e-8, [&] {
    const auto p = chain(64, 10.0, 0.1);
    return detail::phase_aligned_diff(detail::brute_propagator(p), uhc_matrix(p, 1.0));
  });
  const double n64_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.checks.push_back({"n64_oracle_block_seconds", n64_seconds, 10.0, n64_seconds < 10.0, n64_seconds, true});

  add("dense_vs_transform_engine", 1e-9, [&] {
    const auto p = chain(256, 20.0, 0.1);
    const FloquetContext dense(p, Engine::dense), fast(p, Engine::transform);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    std::vector<cplx> a(256);
    for (auto& v : a) v = {g(rng), g(rng)};
    SpinState x = SpinState(std::move(a)).normalize(), y = x;
    for (int t = 0; t < 50; ++t) {
      x = step_period(x, dense);
      y = detail::harness_step(y, fast, opt.inject_kick_sign_error);
    }
    return max_abs_diff(x, y);
  });
  add("frs_quadrature_vs_open_chain", 5e-3, [&] {
    const auto p = chain(1024, 10.0, 0.1);
    const EigenBasis basis(p);
    double dev = 0;
    for (auto [r, s] : {std::pair{512, 512}, std::pair{510, 515}, std::pair{500, 520}}) {
      const auto col = apply_uhc(SpinState::basis(1024, s), basis, 1.0);
      dev = std::max(dev, std::abs(frs_quadrature(r, s, p).value - col.at(r)));
    }
    return dev;
  });
  // Interior margin wide enough that the neglected image terms J_{n > 2M}(beta)
  // lie past the Bessel turning point n ~ beta.
  add("bessel_kick_vs_open_chain_interior", 1e-3, [&] {
    const auto p = chain(256, 20.0, 0.1);
    const int margin = 20;
    const Eigen::MatrixXcd u = uhc_matrix(p, 1.0) * std::polar(1.0, p.beta);
    const auto k = qkr_kick_matrix(RotorBasis::matching(p));
    const int len = p.n_sites - 2 * margin;
    return (u - k).block(margin, margin, len, len).cwiseAbs().maxCoeff();
  });
  add("bessel_kick_vs_ring", 1e-10, [&] {
    const auto p = chain(256, 20.0, 0.1, Boundary::ring);
    const Eigen::MatrixXcd u = uhc_matrix(p, 1.0) * std::polar(1.0, p.beta);
    return (u - qkr_kick_matrix(RotorBasis::matching(p))).cwiseAbs().maxCoeff();
  });
  // Relative error; K = 10, where the truncated correlation series is accurate.
  add("rechester_vs_ensemble", 0.10, [&] {
    const double d = rechester_d(10.0);
    return std::abs(classical_diffusion(10.0, 100'000, 50, 1).rate - d) / d;
  });
  add("q_ipr_identity", 1e-12, [&] {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g;
    double dev = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 200);
      std::vector<cplx> a(static_cast<std::size_t>(n));
      for (auto& v : a) v = {g(rng), g(rng)};
      const auto s = SpinState(std::move(a)).normalize();
      const double expected = 4.0 / n * (1.0 - 1.0 / ipr(s));
      dev = std::max(dev, std::abs(q_measure(s) - expected) / expected);
    }
    return dev;
  });
  add("concurrence_maximum_grid_search", 1e-3, [&] {
    double dev = 0;
    for (double d : {5.0, 10.0, 50.0}) {
      double best_l = 0, best_c = 0;
      for (int k = 1; k <= 100000; ++k) {
        const double l = k * d * 4e-5;
        const double c = 8.0 / l * std::exp(-2.0 * d / l);
        if (c > best_c) {
          best_c = c;
          best_l = l;
        }
      }
      const auto m = concurrence_profile_max(d);
      dev = std::max({dev, std::abs(m.l_opt / best_l - 1.0), std::abs(m.c_max / best_c - 1.0)});
    }
    return dev;
  });
  // Deviation of the per-period advance from 94 sites; peaks must also sit
  // within 5 sites of n0 +- j 2 pi / B_Q.
  add("fig1_hop", 2.0, [&] {
    const auto h = measure_fig1_hop(opt.inject_kick_sign_error);
    return h.worst_peak_offset > 5.0 ? INFINITY : std::abs(h.advance - 94.0);
  });
  return rep;
}

}  // namespace kickchain
