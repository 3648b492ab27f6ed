#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "kickchain/eigenbasis.hpp"
#include "kickchain/errors.hpp"
#include "kickchain/params.hpp"
#include "kickchain/spin_state.hpp"

namespace kickchain {

inline constexpr int kDefaultDenseCap = 4096;
// Complex numbers a single trajectory may hold (about 320 MB).
inline constexpr std::size_t kDefaultSnapshotCap = std::size_t{20'000'000};

enum class Engine { dense, transform };

inline std::string_view to_string(Engine e) {
  return e == Engine::dense ? "dense" : "transform";
}

inline void check_dense_cap(int n_sites, int dense_cap) {
  if (n_sites > dense_cap)
    throw CapacityError("dense propagator for N = " + std::to_string(n_sites) +
                        " exceeds the cap of " + std::to_string(dense_cap) +
                        " sites; use the transform engine");
}

// Hopping propagator exp(-i H_hc t) of the ring, t in pulse periods. Built
// from plane-wave eigenmodes with phases beta [1 - cos(2 pi k / N)]; depends
// only on (r - s) mod N.
inline Eigen::MatrixXcd ring_propagator(int n_sites, double beta, double periods,
                                        int dense_cap = kDefaultDenseCap) {
  if (n_sites < 1) throw DomainError("ring needs at least one site");
  check_dense_cap(n_sites, dense_cap);
  const int n = n_sites;
  std::vector<cplx> column(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) {
    cplx acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const double q = 2.0 * std::numbers::pi * k / n;
      const double phase = -beta * (1.0 - std::cos(q)) * periods + q * d;
      acc += std::polar(1.0, phase);
    }
    column[static_cast<std::size_t>(d)] = acc / static_cast<double>(n);
  }
  Eigen::MatrixXcd u(n, n);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s) u(r, s) = column[static_cast<std::size_t>(((r - s) % n + n) % n)];
  return u;
}

// Analytic hopping propagator <r| U_hc(t) |s> in the single-excitation basis,
// t measured in pulse periods. Open chains use the cosine eigenmodes, rings
// the plane-wave form above.
inline Eigen::MatrixXcd uhc_matrix(const ChainParams& p, double periods,
                                   int dense_cap = kDefaultDenseCap) {
  p.validate();
  check_dense_cap(p.n_sites, dense_cap);
  if (p.boundary == Boundary::ring) return ring_propagator(p.n_sites, p.beta, periods, dense_cap);
  if (p.n_sites < 2) throw DomainError("open chain needs at least two sites");
  const int n = p.n_sites;
  Eigen::MatrixXd g(n, n);
  for (int m = 1; m <= n; ++m)
    for (int j = 1; j <= n; ++j) g(m - 1, j - 1) = mode_entry(m, j, n);
  Eigen::VectorXcd phase(n);
  for (int m = 1; m <= n; ++m)
    phase(m - 1) = std::polar(1.0, -p.beta * (1.0 - std::cos(std::numbers::pi * (m - 1) / n)) * periods);
  const Eigen::MatrixXcd left = g.transpose().cast<cplx>() * phase.asDiagonal();
  return left * g.cast<cplx>();
}

// Hopping evolution through the eigenmode transform: O(N log N) per call.
inline SpinState apply_uhc(const SpinState& state, const EigenBasis& basis, double periods) {
  if (state.size() != basis.size())
    throw DimensionError("state length " + std::to_string(state.size()) +
                         " does not match basis size " + std::to_string(basis.size()));
  auto modes = basis.to_modes(state);
  const auto& phi = basis.eigenphases();
  for (std::size_t m = 0; m < modes.size(); ++m) modes[m] *= std::polar(1.0, -phi[m] * periods);
  return basis.from_modes(modes);
}

// Phase e^{-i (b_q/2)(r - n0)^2} at each site; `scale` multiplies b_q and is
// -1 for the inverse pulse.
inline std::vector<cplx> kick_phases(const ChainParams& p, double scale = 1.0) {
  std::vector<cplx> k(static_cast<std::size_t>(p.n_sites));
  for (int r = 1; r <= p.n_sites; ++r) {
    const double d = r - p.center;
    k[static_cast<std::size_t>(r - 1)] = std::polar(1.0, -scale * 0.5 * p.b_q * d * d);
  }
  return k;
}

inline SpinState apply_kick(const SpinState& state, const ChainParams& p, double scale = 1.0) {
  if (state.size() != p.n_sites) throw DimensionError("state length does not match chain");
  SpinState out = state;
  auto a = out.amplitudes();
  const auto k = kick_phases(p, scale);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= k[i];
  return out;
}

// Everything needed to advance a state by whole pulse periods.
//
// The dense engine holds the full one-period operator diag(kick) * U_hc and
// therefore owns an independent implementation of both factors; the transform
// engine composes apply_uhc and apply_kick.
class FloquetContext {
 public:
  FloquetContext(const ChainParams& p, Engine engine, int dense_cap = kDefaultDenseCap)
      : params_(p), engine_(engine) {
    p.validate();
    kick_ = kick_phases(p);
    if (engine == Engine::transform) {
      if (p.boundary == Boundary::ring)
        throw ConfigError("ring boundary is only supported by the dense engine", "engine");
      basis_.emplace(p);
    } else {
      Eigen::MatrixXcd u = uhc_matrix(p, 1.0, dense_cap);
      for (int r = 0; r < p.n_sites; ++r) u.row(r) *= kick_[static_cast<std::size_t>(r)];
      floquet_ = std::move(u);
    }
  }

  const ChainParams& params() const noexcept { return params_; }
  Engine engine() const noexcept { return engine_; }
  const std::optional<EigenBasis>& basis() const noexcept { return basis_; }
  // One-period operator; present for the dense engine only.
  const std::optional<Eigen::MatrixXcd>& floquet_matrix() const noexcept { return floquet_; }

 private:
  friend SpinState step_period(const SpinState&, const FloquetContext&);
  ChainParams params_;
  Engine engine_;
  std::vector<cplx> kick_;
  std::optional<EigenBasis> basis_;
  std::optional<Eigen::MatrixXcd> floquet_;
};

// One pulse period: hop for T0, then the parabolic kick.
inline SpinState step_period(const SpinState& state, const FloquetContext& ctx) {
  if (state.size() != ctx.params_.n_sites) throw DimensionError("state length does not match chain");
  if (ctx.engine_ == Engine::dense) {
    const auto a = state.amplitudes();
    Eigen::Map<const Eigen::VectorXcd> in(a.data(), static_cast<Eigen::Index>(a.size()));
    Eigen::VectorXcd out = (*ctx.floquet_) * in;
    return SpinState(std::vector<cplx>(out.data(), out.data() + out.size()));
  }
  SpinState hopped = apply_uhc(state, *ctx.basis_, 1.0);
  auto a = hopped.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= ctx.kick_[i];
  return hopped;
}

// Exact inverse of step_period on the transform path: undo the kick, then
// hop backwards.
inline SpinState unstep_period(const SpinState& state, const ChainParams& p, const EigenBasis& basis) {
  return apply_uhc(apply_kick(state, p, -1.0), basis, -1.0);
}

struct Trajectory {
  std::vector<int> periods;
  std::vector<SpinState> states;
};

// Iterates step_period, keeping the initial state and every `record_every`-th
// period.
inline Trajectory evolve(const SpinState& initial, const FloquetContext& ctx, int n_periods,
                         int record_every = 1, std::size_t snapshot_cap = kDefaultSnapshotCap) {
  if (n_periods < 0) throw DomainError("n_periods must be nonnegative");
  if (record_every < 1) throw DomainError("record_every must be positive");
  const std::size_t snapshots = 1 + static_cast<std::size_t>(n_periods / record_every);
  if (snapshots * static_cast<std::size_t>(initial.size()) > snapshot_cap)
    throw CapacityError("trajectory of " + std::to_string(snapshots) + " snapshots x " +
                        std::to_string(initial.size()) + " sites exceeds the snapshot cap");
  Trajectory t;
  t.periods.reserve(snapshots);
  t.states.reserve(snapshots);
  t.periods.push_back(0);
  t.states.push_back(initial);
  SpinState psi = initial;
  for (int j = 1; j <= n_periods; ++j) {
    psi = step_period(psi, ctx);
    if (j % record_every == 0) {
      t.periods.push_back(j);
      t.states.push_back(psi);
    }
  }
  return t;
}

// Single-excitation block of H_hc times T0, in units with J T0 = beta / 2.
// Nearest-neighbour hopping -J; the diagonal counts antiparallel bonds, so an
// excitation on an open-chain end costs J and one in the bulk 2J above the
// fully polarized reference energy -(J/2) * (number of bonds). The uniform
// static-field term is dropped.
inline Eigen::MatrixXd oracle_hamiltonian(const ChainParams& p, int dense_cap = kDefaultDenseCap) {
  p.validate();
  check_dense_cap(p.n_sites, dense_cap);
  const int n = p.n_sites;
  const double j_t0 = 0.5 * p.beta;
  const bool ring = p.boundary == Boundary::ring;
  const int bonds = ring ? n : n - 1;
  const double reference = -0.5 * j_t0 * bonds;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    int broken = 0;
    if (ring || r > 0) ++broken;
    if (ring || r < n - 1) ++broken;
    h(r, r) = reference + j_t0 * broken;
  }
  for (int r = 0; r + 1 < n; ++r) h(r, r + 1) = h(r + 1, r) = -j_t0;
  if (ring && n > 2) {
    h(0, n - 1) += -j_t0;
    h(n - 1, 0) += -j_t0;
  }
  return h;
}

}  // namespace kickchain
