#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kickchain/chain.hpp"
#include "kickchain/errors.hpp"
#include "kickchain/observables.hpp"
#include "kickchain/params.hpp"
#include "kickchain/spin_state.hpp"

namespace kickchain {

struct SiteRange {
  Site first = 1;
  Site last = 0;

  bool contains(Site s) const { return s >= first && s <= last; }
  bool empty() const { return last < first; }
};

struct MeasurementOutcome {
  bool success = false;        // true on the branch where the excitation was not found in the window
  double probability = 0;
  std::optional<SpinState> post_state;  // renormalized; absent when probability is 0
};

struct MeasurementBranches {
  MeasurementOutcome success;
  MeasurementOutcome failure;
  bool window_covers_chain = false;
};

// Two-outcome projective measurement "is the excitation inside `window`?".
inline MeasurementBranches central_measurement(const SpinState& state, SiteRange window) {
  const int n = state.size();
  if (window.empty()) throw DomainError("measurement window is empty");
  if (window.first < 1 || window.last > n) throw DomainError("measurement window leaves the chain");
  std::vector<cplx> inside(static_cast<std::size_t>(n)), outside(static_cast<std::size_t>(n));
  double p_in = 0, p_out = 0;
  for (int s = 1; s <= n; ++s) {
    const auto a = state.at(s);
    if (window.contains(s)) {
      inside[static_cast<std::size_t>(s - 1)] = a;
      p_in += std::norm(a);
    } else {
      outside[static_cast<std::size_t>(s - 1)] = a;
      p_out += std::norm(a);
    }
  }
  const double total = p_in + p_out;
  MeasurementBranches b;
  b.window_covers_chain = window.first == 1 && window.last == n;
  b.success.success = true;
  b.success.probability = p_out / total;
  if (p_out > 0) b.success.post_state = SpinState(std::move(outside)).normalize();
  b.failure.success = false;
  b.failure.probability = p_in / total;
  if (p_in > 0) b.failure.post_state = SpinState(std::move(inside)).normalize();
  return b;
}

// Sites assigned to the chaotic remnant after pulse j, clipped to the chain.
inline SiteRange remnant_window(const ChainParams& p, int pulse_index) {
  const double r = remnant_radius(p, pulse_index);
  const auto first = static_cast<Site>(std::ceil(p.center - r));
  const auto last = static_cast<Site>(std::floor(p.center + r));
  return {std::max(first, 1), std::min(last, p.n_sites)};
}

// Wavenumber of the stable accelerator orbit, sin k = 2 pi / K_s. Zero below
// the accelerator threshold K_s < 2 pi.
inline double accelerator_carrier(const ChainParams& p) {
  const double k_s = p.beta * p.b_q;
  const double ratio = 2.0 * std::numbers::pi / k_s;
  return (k_s > 0 && ratio <= 1.0) ? std::asin(ratio) : 0.0;
}

struct PacketPair {
  SpinState left;   // normalized
  SpinState right;  // normalized
  double left_centre = 0;
  double right_centre = 0;
};

// Normalized Gaussian packets |psi| ~ exp(-B_Q (s - s_pm)^2) centred at
// s_pm = n0 +- 2 pi j / B_Q. Each packet carries the accelerator carrier
// e^{+-i k (s - s_pm)}, pointing away from the centre, and the local chirp
// e^{-i (B_Q/2)(s - s_pm)^2} left by the last pulse.
inline PacketPair ideal_packets(const ChainParams& p, int pulse_index) {
  p.validate();
  if (pulse_index < 1) throw DomainError("pulse_index must be at least 1");
  if (!(p.b_q > 0)) throw DomainError("packets need b_q > 0");
  const double offset = 2.0 * std::numbers::pi * pulse_index / p.b_q;
  const double margin = 3.0 / std::sqrt(p.b_q);
  PacketPair pp;
  pp.left_centre = p.center - offset;
  pp.right_centre = p.center + offset;
  if (pp.left_centre - margin < 1 || pp.right_centre + margin > p.n_sites)
    throw DomainError("packets out of range: n0 +- 2 pi j / B_Q must stay 3 / sqrt(B_Q) sites inside the chain");
  const double k = accelerator_carrier(p);
  auto packet = [&](double centre, double dir) {
    std::vector<cplx> a(static_cast<std::size_t>(p.n_sites));
    for (int s = 1; s <= p.n_sites; ++s) {
      const double u = s - centre;
      a[static_cast<std::size_t>(s - 1)] =
          std::polar(std::exp(-p.b_q * u * u), dir * k * u - 0.5 * p.b_q * u * u);
    }
    return SpinState(std::move(a)).normalize();
  };
  pp.left = packet(pp.left_centre, -1.0);
  pp.right = packet(pp.right_centre, 1.0);
  return pp;
}

// Equal-weight superposition (|G_L> + |G_R>) / sqrt(2).
inline SpinState ideal_packet_pair(const ChainParams& p, int pulse_index) {
  const auto pp = ideal_packets(p, pulse_index);
  std::vector<cplx> a(static_cast<std::size_t>(p.n_sites));
  for (int s = 1; s <= p.n_sites; ++s) a[static_cast<std::size_t>(s - 1)] = pp.left.at(s) + pp.right.at(s);
  return SpinState(std::move(a)).normalize();
}

struct FidelityResult {
  double fidelity = 0;
  double relative_phase = 0;  // theta in (|G_L> + e^{i theta} |G_R>) / sqrt(2)
};

// max over theta of |<(G_L + e^{i theta} G_R)/sqrt(2) | psi>|^2. The packets are
// separated by many widths, so they are treated as orthogonal.
inline FidelityResult packet_fidelity(const PacketPair& pp, const SpinState& psi) {
  const cplx a = inner(pp.left, psi);
  const cplx b = inner(pp.right, psi);
  const double s = std::abs(a) + std::abs(b);
  return {0.5 * s * s, std::arg(b) - std::arg(a)};
}

struct ProtocolReport {
  int pulses = 0;
  double success_probability = 0;
  double fidelity = 0;
  double relative_phase = 0;
  double left_weight = 0;   // of the post-selected state
  double right_weight = 0;
  SiteRange window;
  std::vector<std::string> warnings;
};

// Evolve |n0> for n_pulses periods, measure the remnant window and keep the
// branch where the excitation is not found there.
inline ProtocolReport run_protocol(const ChainParams& p, int n_pulses, Engine engine = Engine::transform) {
  p.validate();
  if (n_pulses < 1) throw DomainError("protocol needs at least one pulse");
  ProtocolReport rep;
  rep.pulses = n_pulses;
  if (n_pulses < 3) rep.warnings.emplace_back("fewer than 3 pulses: packets are not yet separated from the remnant");
  const FloquetContext ctx(p, engine);
  SpinState psi = SpinState::basis(p.n_sites, p.center);
  for (int j = 0; j < n_pulses; ++j) psi = step_period(psi, ctx);

  rep.window = remnant_window(p, n_pulses);
  const auto branches = central_measurement(psi, rep.window);
  rep.success_probability = branches.success.probability;
  if (branches.window_covers_chain) rep.warnings.emplace_back("measurement window covers the whole chain");
  if (!branches.success.post_state) return rep;

  const auto& post = *branches.success.post_state;
  for (int s = 1; s <= p.n_sites; ++s) {
    if (s < p.center) rep.left_weight += std::norm(post.at(s));
    if (s > p.center) rep.right_weight += std::norm(post.at(s));
  }
  const auto f = packet_fidelity(ideal_packets(p, n_pulses), post);
  rep.fidelity = f.fidelity;
  rep.relative_phase = f.relative_phase;
  return rep;
}

}  // namespace kickchain
