#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kickchain/errors.hpp"
#include "kickchain/params.hpp"
#include "kickchain/spin_state.hpp"

namespace kickchain {

// P(s) = |alpha_s|^2; index 0 is site 1.
struct SiteDistribution {
  std::vector<double> probabilities;

  int size() const noexcept { return static_cast<int>(probabilities.size()); }
  double at(Site s) const { return probabilities.at(static_cast<std::size_t>(s - 1)); }
  double total() const { return std::accumulate(probabilities.begin(), probabilities.end(), 0.0); }
};

inline SiteDistribution site_distribution(const SpinState& state) {
  SiteDistribution d;
  d.probabilities.reserve(static_cast<std::size_t>(state.size()));
  for (const auto& a : state.amplitudes()) d.probabilities.push_back(std::norm(a));
  return d;
}

// Elementwise mean of several distributions, e.g. over the last periods of a
// localized run.
inline SiteDistribution average_distribution(const std::vector<SiteDistribution>& ds) {
  if (ds.empty()) throw InsufficientDataError("no distributions to average");
  SiteDistribution out;
  out.probabilities.assign(ds.front().probabilities.size(), 0.0);
  for (const auto& d : ds) {
    if (d.probabilities.size() != out.probabilities.size())
      throw DimensionError("distributions of different length");
    for (std::size_t i = 0; i < d.probabilities.size(); ++i) out.probabilities[i] += d.probabilities[i];
  }
  for (auto& p : out.probabilities) p /= static_cast<double>(ds.size());
  return out;
}

// B_Q^2 sum_s P(s) (s - s0)^2, the spread in rotor-momentum units.
inline double spread_variance(const SiteDistribution& d, Site s0, double b_q) {
  double acc = 0.0;
  for (int s = 1; s <= d.size(); ++s) {
    const double dx = s - s0;
    acc += d.probabilities[static_cast<std::size_t>(s - 1)] * dx * dx;
  }
  return b_q * b_q * acc;
}

struct PeriodRange {
  int first = 0;
  int last = 0;
  bool contains(double t) const { return t >= first && t <= last; }
};

struct DiffusionFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  int points = 0;
  std::vector<std::string> warnings;
};

// Order-of-magnitude time after which quantum spreading stops following the
// classical rate: (K_s / B_Q)^2.
inline double break_time(const DerivedParams& d) {
  if (!(d.hbar_eff > 0)) throw DomainError("break time needs b_q > 0");
  const double ratio = d.k_s / d.hbar_eff;
  return ratio * ratio;
}

// Periods 1 .. min(10, t*/4).
inline PeriodRange default_diffusion_window(const DerivedParams& d) {
  const double quarter = d.hbar_eff > 0 ? break_time(d) / 4.0 : 10.0;
  return {1, static_cast<int>(std::max(1.0, std::min(10.0, std::floor(quarter))))};
}

namespace detail {

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  double rms_residual = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.r_squared = syy > 0 ? 1.0 - ss_res / syy : 0.0;
  f.rms_residual = std::sqrt(ss_res / n);
  return f;
}

}  // namespace detail

// Least-squares line through the (period, variance) points inside `window`.
// If a break time is given, warns when the window reaches past half of it.
inline DiffusionFit fit_diffusion(const std::vector<std::pair<double, double>>& series, PeriodRange window,
                                  std::optional<double> break_time_estimate = std::nullopt) {
  std::vector<double> t, v;
  for (const auto& [period, variance] : series)
    if (window.contains(period)) {
      t.push_back(period);
      v.push_back(variance);
    }
  if (t.size() < 3) throw InsufficientDataError("diffusion fit needs at least 3 points in the window");
  const auto line = detail::fit_line(t, v);
  DiffusionFit out{line.slope, line.intercept, line.r_squared, static_cast<int>(t.size()), {}};
  if (break_time_estimate && window.last > *break_time_estimate / 2.0)
    out.warnings.emplace_back("fit window extends past half the break time");
  if (out.r_squared < 0.9) out.warnings.emplace_back("low r^2: spreading is not linear in time (saturated?)");
  return out;
}

struct LocalizationFit {
  double length = 0;     // L, from slope -2/L of ln P against |s - s0|
  double intercept = 0;
  double residual = 0;   // RMS of the log-linear fit
  int window_min = 0;    // |s - s0| range used
  int window_max = 0;
  double decades = 0;    // decay of the fitted line across the window, log10 units
};

struct NotLocalized {
  std::string reason;
};

inline constexpr double kLocalizationResidualLimit = 3.0;

// Log-linear fit of ln P(s) against |s - s0|. The window starts 2 sites off the
// peak and runs outward on each side until P first drops below 1e-8, stopping
// 5 sites short of the chain ends.
inline std::variant<LocalizationFit, NotLocalized> fit_localization_length(const SiteDistribution& d,
                                                                           Site s0) {
  const int n = d.size();
  if (s0 < 1 || s0 > n) throw DomainError("s0 outside chain");
  constexpr double floor = 1e-8;
  constexpr int offset = 2;
  constexpr int edge_margin = 5;
  std::vector<double> x, y;
  int reach = 0;
  for (int dir : {-1, 1}) {
    for (int k = offset;; ++k) {
      const int s = s0 + dir * k;
      if (s < 1 + edge_margin || s > n - edge_margin) break;
      const double p = d.at(s);
      if (!(p >= floor)) break;
      x.push_back(k);
      y.push_back(std::log(p));
      reach = std::max(reach, k);
    }
  }
  if (x.size() < 3) return NotLocalized{"fewer than 3 usable sites in the fit window"};
  const auto line = detail::fit_line(x, y);
  LocalizationFit f;
  f.intercept = line.intercept;
  f.residual = line.rms_residual;
  f.window_min = offset;
  f.window_max = reach;
  f.decades = -line.slope * (reach - offset) / std::numbers::ln10;
  if (!(line.slope < 0) || f.decades < 1.0)
    return NotLocalized{"profile does not decay by a decade across the window"};
  if (!(f.residual <= kLocalizationResidualLimit)) return NotLocalized{"log-linear residual too large"};
  f.length = -2.0 / line.slope;
  return f;
}

inline double sum_fourth_powers(const SpinState& s) {
  double acc = 0.0;
  for (const auto& a : s.amplitudes()) {
    const double p = std::norm(a);
    acc += p * p;
  }
  return acc;
}

// Global entanglement (4/N)(1 - sum_k |alpha_k|^4).
inline double q_measure(const SpinState& s) {
  return 4.0 / s.size() * (1.0 - sum_fourth_powers(s));
}

// Inverse participation ratio 1 / sum_k |alpha_k|^4.
inline double ipr(const SpinState& s) { return 1.0 / sum_fourth_powers(s); }

// Pairwise concurrence in the one-excitation sector, taken as 4 |alpha_i| |alpha_j|.
inline double concurrence(const SpinState& s, Site i, Site j) {
  if (i == j) throw DomainError("concurrence needs two distinct sites");
  return 4.0 * std::abs(s.at(i)) * std::abs(s.at(j));
}

// Largest pairwise concurrence over all site pairs; equals
// 4 * (largest |alpha|) * (second largest |alpha|).
inline double max_concurrence(const SpinState& s) {
  double first = 0, second = 0;
  for (const auto& a : s.amplitudes()) {
    const double m = std::abs(a);
    if (m > first) {
      second = first;
      first = m;
    } else if (m > second) {
      second = m;
    }
  }
  return 4.0 * first * second;
}

struct ConcurrenceMax {
  double l_opt = 0;
  double c_max = 0;
};

// Maximum over L of C(L) = (8/L) exp(-2d/L): L = 2d, C = 4 / (d e).
inline ConcurrenceMax concurrence_profile_max(double d) {
  if (!(d > 0)) throw DomainError("concurrence_profile_max needs d > 0");
  return {2.0 * d, 4.0 / (d * std::numbers::e)};
}

struct AcceleratorMode {
  double position = 0;         // fitted packet centre s_j (site units)
  double weight = 0;           // probability beyond the remnant boundary on this side
  double width_parameter = 0;  // B in |psi|^2 ~ A^2 exp(-2 B (s - s_j)^2)
  double amplitude = 0;        // A, fitted peak of |psi|
};

struct ModeReport {
  int pulse_index = 0;
  std::vector<AcceleratorMode> modes;  // sorted by position
  double remnant_weight = 0;
  double remnant_radius = 0;
};

inline constexpr double kModeWeightThreshold = 0.02;

// Sites with |s - n0| <= (2j - 1) pi / B_Q belong to the chaotic remnant after
// pulse j: half a hop behind where an accelerator packet is expected.
inline double remnant_radius(const ChainParams& p, int pulse_index) {
  if (!(p.b_q > 0)) throw DomainError("remnant radius needs b_q > 0");
  return (2.0 * pulse_index - 1.0) * std::numbers::pi / p.b_q;
}

namespace detail {

struct GaussianFit {
  double centre = 0;
  double width = 0;      // B
  double amplitude = 0;  // A
  bool ok = false;
};

// Weighted quadratic fit of ln P over the contiguous run of sites around
// `peak` (0-based) where P >= fraction * P[peak].
inline GaussianFit fit_gaussian(const std::vector<double>& prob, int peak, double fraction, int lo_limit,
                                int hi_limit) {
  const double top = prob[static_cast<std::size_t>(peak)];
  int lo = peak, hi = peak;
  while (lo - 1 >= lo_limit && prob[static_cast<std::size_t>(lo - 1)] >= fraction * top) --lo;
  while (hi + 1 <= hi_limit && prob[static_cast<std::size_t>(hi + 1)] >= fraction * top) ++hi;
  if (hi - lo < 2) {
    lo = std::max(lo_limit, lo - 1);
    hi = std::min(hi_limit, hi + 1);
  }
  GaussianFit g;
  if (hi - lo < 2) return g;
  // Normal equations for y = c0 + c1 u + c2 u^2 with u = s - peak, weights P.
  double m[3][4] = {};
  for (int i = lo; i <= hi; ++i) {
    const double p = prob[static_cast<std::size_t>(i)];
    if (!(p > 0)) continue;
    const double u = i - peak;
    const double y = std::log(p);
    const double basis[3] = {1.0, u, u * u};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) m[a][b] += p * basis[a] * basis[b];
      m[a][3] += p * basis[a] * y;
    }
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    std::swap(m[c], m[piv]);
    if (std::abs(m[c][c]) < 1e-300) return g;
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
    }
  }
  const double c0 = m[0][3] / m[0][0], c1 = m[1][3] / m[1][1], c2 = m[2][3] / m[2][2];
  if (!(c2 < 0)) return g;
  const double shift = -c1 / (2.0 * c2);
  g.centre = peak + shift;
  g.width = -c2 / 2.0;
  g.amplitude = std::sqrt(std::exp(c0 - c1 * c1 / (4.0 * c2)));
  g.ok = std::isfinite(g.centre) && std::abs(shift) <= hi - lo;
  return g;
}

}  // namespace detail

// Finds the counter-propagating accelerator packets after pulse j.
//
// Probability beyond the remnant boundary on each side is attributed to that
// side's packet; a packet is reported when this weight reaches `threshold`.
// The packet centre and amplitude come from a Gaussian fit of ln P over the
// sites within 10% of the peak, the width exponent from a fit over the
// half-maximum core.
inline ModeReport detect_accelerator_modes(const SpinState& state, int pulse_index, const ChainParams& p,
                                           double threshold = kModeWeightThreshold) {
  if (pulse_index < 1) throw DomainError("pulse_index must be at least 1");
  if (state.size() != p.n_sites) throw DimensionError("state length does not match chain");
  const auto dist = site_distribution(state);
  const auto& prob = dist.probabilities;
  const int n = p.n_sites;
  const double radius = remnant_radius(p, pulse_index);

  ModeReport report;
  report.pulse_index = pulse_index;
  report.remnant_radius = radius;
  double outside = 0.0;
  for (int dir : {-1, 1}) {
    // 0-based index range of this side's outer region.
    int lo, hi;
    if (dir < 0) {
      lo = 0;
      hi = static_cast<int>(std::ceil(p.center - radius)) - 2;
    } else {
      lo = static_cast<int>(std::floor(p.center + radius));
      hi = n - 1;
    }
    lo = std::max(lo, 0);
    hi = std::min(hi, n - 1);
    if (lo > hi) continue;
    double weight = 0.0;
    int peak = lo;
    for (int i = lo; i <= hi; ++i) {
      weight += prob[static_cast<std::size_t>(i)];
      if (prob[static_cast<std::size_t>(i)] > prob[static_cast<std::size_t>(peak)]) peak = i;
    }
    outside += weight;
    if (weight < threshold) continue;

    AcceleratorMode mode;
    mode.weight = weight;
    const auto loc = detail::fit_gaussian(prob, peak, 0.1, lo, hi);
    const auto core = detail::fit_gaussian(prob, peak, 0.5, lo, hi);
    mode.position = (loc.ok ? loc.centre : peak) + 1.0;
    mode.amplitude = loc.ok ? loc.amplitude : std::sqrt(prob[static_cast<std::size_t>(peak)]);
    mode.width_parameter = core.ok ? core.width : NAN;
    report.modes.push_back(mode);
  }
  std::sort(report.modes.begin(), report.modes.end(),
            [](const auto& a, const auto& b) { return a.position < b.position; });
  report.remnant_weight = dist.total() - outside;
  return report;
}

inline double total_mode_weight(const ModeReport& r) {
  double w = 0;
  for (const auto& m : r.modes) w += m.weight;
  return w;
}

struct ModeDecay {
  double rate = 0;  // weight(j) ~ exp(-rate j)
  bool oscillatory = false;
  double amplitude_residual = 0;   // RMS of the ln A^2 fit residuals
  double residual_correlation = 0; // lag-1 autocorrelation of those residuals
};

// Exponential decay of the total packet weight with pulse number. The
// amplitude series ln A_j^2 is fitted to a line as well; residuals that
// alternate from pulse to pulse (negative lag-1 autocorrelation) with an RMS
// above 0.05 mark an oscillating packet.
inline ModeDecay mode_decay(const std::vector<ModeReport>& reports) {
  std::vector<double> j, lw, la;
  for (const auto& r : reports) {
    if (r.modes.empty()) continue;
    double a2 = 0;
    for (const auto& m : r.modes) a2 += m.amplitude * m.amplitude;
    j.push_back(r.pulse_index);
    lw.push_back(std::log(total_mode_weight(r)));
    la.push_back(std::log(a2 / static_cast<double>(r.modes.size())));
  }
  if (j.size() < 5) throw InsufficientDataError("mode decay needs at least 5 reports with detected modes");
  ModeDecay out;
  out.rate = -detail::fit_line(j, lw).slope;
  if (std::abs(out.rate) < 1e-14) out.rate = 0.0;
  const auto amp = detail::fit_line(j, la);
  std::vector<double> res(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) res[i] = la[i] - (amp.intercept + amp.slope * j[i]);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    den += res[i] * res[i];
    if (i > 0) num += res[i] * res[i - 1];
  }
  out.amplitude_residual = amp.rms_residual;
  out.residual_correlation = den > 0 ? num / den : 0.0;
  out.oscillatory = out.amplitude_residual > 0.05 && out.residual_correlation < 0.0;
  return out;
}

}  // namespace kickchain
