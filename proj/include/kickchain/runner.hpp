#pragma once

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "kickchain/chain.hpp"
#include "kickchain/config.hpp"
#include "kickchain/observables.hpp"
#include "kickchain/protocol.hpp"
#include "kickchain/qkr.hpp"
#include "kickchain/validate.hpp"

namespace kickchain {

inline constexpr std::string_view kVersion = "0.1.0";

struct OutputFile {
  std::string name;
  std::size_t bytes = 0;
  std::string sha256;
};

struct RunManifest {
  ExperimentConfig config;
  DerivedParams derived;
  std::string version{kVersion};
  double wall_clock_seconds = 0;
  std::vector<OutputFile> files;
  std::optional<bool> validation_passed;  // validate experiment only
};

// 12 significant digits, independent of the C locale.
inline std::string format_number(double v) {
  std::array<char, 40> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 12);
  return {buf.data(), r.ptr};
}

inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

// Writes to a temporary sibling and renames it into place.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) throw IoError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

// Column data written as CSV (header row) or as a JSON object of columns.
struct Table {
  std::string stem;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string csv() const {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
    out += '\n';
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) {
        if (c) out += ',';
        out += format_number(r[c]);
      }
      out += '\n';
    }
    return out;
  }

  std::string json() const {
    nlohmann::ordered_json j;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      auto col = nlohmann::json::array();
      for (const auto& r : rows) col.push_back(r[c]);
      j[columns[c]] = std::move(col);
    }
    return j.dump(1) + '\n';
  }
};

inline nlohmann::ordered_json to_json(const DerivedParams& d) {
  return {{"k_s", d.k_s},
          {"hbar_eff", d.hbar_eff},
          {"alpha", d.alpha},
          {"hop_distance", d.hop_distance},
          {"localization_length", d.localization_length},
          {"break_time", d.break_time}};
}

inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  return {{"experiment", to_string(c.experiment)},
          {"n_sites", c.chain.n_sites},
          {"center", c.chain.center},
          {"beta", c.chain.beta},
          {"b_q", c.chain.b_q},
          {"boundary", to_string(c.chain.boundary)},
          {"n_periods", c.n_periods},
          {"record_every", c.record_every},
          {"engine", to_string(c.engine)},
          {"seed", c.seed},
          {"output_dir", c.output_dir},
          {"format", to_string(c.format)},
          {"ensemble", c.ensemble},
          {"average_window", c.average_window}};
}

inline nlohmann::ordered_json to_json(const ModeReport& r) {
  auto modes = nlohmann::ordered_json::array();
  for (const auto& m : r.modes)
    modes.push_back({{"position", m.position},
                     {"weight", m.weight},
                     {"width_parameter", m.width_parameter},
                     {"amplitude", m.amplitude}});
  return {{"pulse_index", r.pulse_index},
          {"remnant_radius", r.remnant_radius},
          {"remnant_weight", r.remnant_weight},
          {"total_mode_weight", total_mode_weight(r)},
          {"modes", modes}};
}

// Least-squares advance per pulse of the packet half-separation, over the
// reports where both packets were found.
inline std::optional<double> hop_per_period(const std::vector<ModeReport>& reports) {
  std::vector<double> j, sep;
  for (const auto& r : reports)
    if (r.modes.size() == 2) {
      j.push_back(r.pulse_index);
      sep.push_back(0.5 * (r.modes[1].position - r.modes[0].position));
    }
  if (j.size() < 2) return std::nullopt;
  return detail::fit_line(j, sep).slope;
}

namespace detail {

class OutputWriter {
 public:
  OutputWriter(std::filesystem::path dir, OutputFormat fmt) : dir_(std::move(dir)), fmt_(fmt) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
  }

  void text(const std::string& name, const std::string& content) {
    write_atomic(dir_ / name, content);
    files_.push_back({name, content.size(), sha256_hex(content)});
  }

  void json(const std::string& name, const nlohmann::ordered_json& j) { text(name, j.dump(1) + '\n'); }

  void table(const Table& t) {
    if (fmt_ == OutputFormat::csv) text(t.stem + ".csv", t.csv());
    else text(t.stem + ".json", t.json());
  }

  const std::vector<OutputFile>& files() const { return files_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  OutputFormat fmt_;
  std::vector<OutputFile> files_;
};

inline std::optional<double> finite_or_null(double v) {
  return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
}

inline nlohmann::ordered_json optional_json(std::optional<double> v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

// Steps from |n0> and hands every period (including 0) to `visit`.
template <class Visit>
void run_periods(const ExperimentConfig& cfg, Visit&& visit) {
  const FloquetContext ctx(cfg.chain, cfg.engine);
  SpinState psi = SpinState::basis(cfg.chain.n_sites, cfg.chain.center);
  visit(0, psi);
  for (int j = 1; j <= cfg.n_periods; ++j) {
    psi = step_period(psi, ctx);
    visit(j, psi);
  }
}

inline void distribution_rows(Table& t, int period, const SpinState& psi) {
  const auto d = site_distribution(psi);
  for (int s = 1; s <= d.size(); ++s) t.rows.push_back({double(period), double(s), d.at(s)});
}

inline void run_evolve(const ExperimentConfig& cfg, OutputWriter& out) {
  Table dist{"distribution", {"period", "site", "probability"}, {}};
  run_periods(cfg, [&](int j, const SpinState& psi) {
    if (j % cfg.record_every == 0) distribution_rows(dist, j, psi);
  });
  out.table(dist);
}

inline void run_fig1(const ExperimentConfig& cfg, OutputWriter& out) {
  Table dist{"distribution", {"period", "site", "probability"}, {}};
  std::vector<ModeReport> reports;
  run_periods(cfg, [&](int j, const SpinState& psi) {
    if (j % cfg.record_every == 0) distribution_rows(dist, j, psi);
    if (j >= 1 && cfg.chain.b_q > 0) reports.push_back(detect_accelerator_modes(psi, j, cfg.chain));
  });
  out.table(dist);
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  out.json("modes.json", {{"expected_hop", derived_params(cfg.chain).hop_distance},
                          {"hop_per_period", optional_json(hop_per_period(reports))},
                          {"reports", arr}});
}

inline void run_diffusion(const ExperimentConfig& cfg, OutputWriter& out) {
  const auto d = derived_params(cfg.chain);
  const double rate = d.k_s > 0 ? rechester_d(d.k_s) : 0.0;
  Table var{"variance", {"period", "variance", "classical_prediction"}, {}};
  std::vector<std::pair<double, double>> series;
  run_periods(cfg, [&](int j, const SpinState& psi) {
    const double v = spread_variance(site_distribution(psi), cfg.chain.center, cfg.chain.b_q);
    series.emplace_back(j, v);
    if (j % cfg.record_every == 0) var.rows.push_back({double(j), v, rate * j});
  });
  out.table(var);

  nlohmann::ordered_json j{{"k_s", d.k_s}, {"rechester_d", rate}};
  const auto window = default_diffusion_window(d);
  j["window"] = {window.first, window.last};
  try {
    const auto fit = fit_diffusion(series, window, d.hbar_eff > 0 ? std::optional(break_time(d)) : std::nullopt);
    j["quantum_slope"] = fit.slope;
    j["r_squared"] = fit.r_squared;
    j["warnings"] = fit.warnings;
  } catch (const InsufficientDataError& e) {
    j["quantum_slope"] = nullptr;
    j["warnings"] = {e.what()};
  }
  if (d.k_s > 0) {
    const auto cl = classical_diffusion(d.k_s, cfg.ensemble, 50, cfg.seed);
    j["classical_rate"] = cl.rate;
    j["classical_ensemble"] = cfg.ensemble;
    j["classical_steps"] = 50;
    j["below_chaos_threshold"] = cl.below_chaos_threshold;
  }
  out.json("diffusion.json", j);
}

inline void run_localization(const ExperimentConfig& cfg, OutputWriter& out) {
  std::vector<SiteDistribution> tail;
  const int first = std::max(0, cfg.n_periods - cfg.average_window + 1);
  run_periods(cfg, [&](int j, const SpinState& psi) {
    if (j >= first) tail.push_back(site_distribution(psi));
  });
  const auto avg = average_distribution(tail);
  Table prof{"profile", {"site", "log_probability"}, {}};
  constexpr double floor = 1e-300;  // keeps ln P finite where P underflows
  for (int s = 1; s <= avg.size(); ++s) prof.rows.push_back({double(s), std::log(std::max(avg.at(s), floor))});
  out.table(prof);

  nlohmann::ordered_json j{{"predicted_length", derived_params(cfg.chain).localization_length},
                           {"averaged_periods", static_cast<int>(tail.size())}};
  const auto fit = fit_localization_length(avg, cfg.chain.center);
  if (const auto* f = std::get_if<LocalizationFit>(&fit)) {
    j["localized"] = true;
    j["length"] = f->length;
    j["intercept"] = f->intercept;
    j["residual"] = f->residual;
    j["window"] = {f->window_min, f->window_max};
    j["decades"] = f->decades;
  } else {
    j["localized"] = false;
    j["reason"] = std::get<NotLocalized>(fit).reason;
  }
  out.json("fit.json", j);
}

inline void run_entanglement(const ExperimentConfig& cfg, OutputWriter& out) {
  Table t{"measures", {"period", "q_measure", "ipr", "max_concurrence"}, {}};
  run_periods(cfg, [&](int j, const SpinState& psi) {
    if (j % cfg.record_every == 0) t.rows.push_back({double(j), q_measure(psi), ipr(psi), max_concurrence(psi)});
  });
  out.table(t);
}

inline void run_accel(const ExperimentConfig& cfg, OutputWriter& out) {
  if (!(cfg.chain.b_q > 0)) throw ConfigError("accel needs b_q > 0", "b_q");
  std::vector<ModeReport> reports;
  run_periods(cfg, [&](int j, const SpinState& psi) {
    if (j >= 1) reports.push_back(detect_accelerator_modes(psi, j, cfg.chain));
  });
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  const auto window = accelerator_window(derived_params(cfg.chain).k_s);
  nlohmann::ordered_json j{{"alpha", window.alpha},
                           {"inside_accelerator_window", window.inside},
                           {"hop_per_period", optional_json(hop_per_period(reports))}};
  // Packets have not left the remnant after the first pulse.
  std::vector<ModeReport> fit_reports;
  for (const auto& r : reports)
    if (r.pulse_index >= 2) fit_reports.push_back(r);
  try {
    const auto decay = mode_decay(fit_reports);
    j["decay"] = {{"rate", decay.rate},
                  {"oscillatory", decay.oscillatory},
                  {"amplitude_residual", decay.amplitude_residual},
                  {"residual_correlation", decay.residual_correlation}};
  } catch (const InsufficientDataError& e) {
    j["decay"] = nullptr;
    j["decay_note"] = e.what();
  }
  j["reports"] = arr;
  out.json("modes.json", j);
}

inline void run_protocol_experiment(const ExperimentConfig& cfg, OutputWriter& out) {
  const auto rep = run_protocol(cfg.chain, cfg.n_periods, cfg.engine);
  out.json("report.json", {{"pulses", rep.pulses},
                           {"success_probability", rep.success_probability},
                           {"fidelity", rep.fidelity},
                           {"relative_phase", rep.relative_phase},
                           {"left_weight", rep.left_weight},
                           {"right_weight", rep.right_weight},
                           {"window", {rep.window.first, rep.window.last}},
                           {"warnings", rep.warnings}});
}

inline bool run_validate(OutputWriter& out) {
  const auto rep = validate_suite();
  auto arr = nlohmann::ordered_json::array();
  // Timings are left out so that the file is reproducible.
  for (const auto& c : rep.checks)
    arr.push_back({{"name", c.name},
                   {"deviation", c.timing ? nlohmann::ordered_json(nullptr)
                                          : optional_json(finite_or_null(c.deviation))},
                   {"tolerance", c.tolerance},
                   {"passed", c.passed}});
  out.json("validation.json", {{"passed", rep.passed()}, {"checks", arr}});
  return rep.passed();
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const RunManifest& m) {
  auto files = nlohmann::ordered_json::array();
  for (const auto& f : m.files) files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  nlohmann::ordered_json j{{"version", m.version},
                           {"config", to_json(m.config)},
                           {"derived_params", to_json(m.derived)},
                           {"wall_clock_seconds", m.wall_clock_seconds},
                           {"files", files}};
  if (m.validation_passed) j["validation_passed"] = *m.validation_passed;
  return j;
}

// Runs one experiment and writes its files plus manifest.json into
// cfg.output_dir. Data files depend only on the config; the manifest adds
// the wall-clock time.
inline RunManifest run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunManifest m;
  m.config = cfg;
  m.derived = derived_params(cfg.chain);
  detail::OutputWriter out(cfg.output_dir, cfg.format);
  switch (cfg.experiment) {
    case Experiment::evolve: detail::run_evolve(cfg, out); break;
    case Experiment::fig1: detail::run_fig1(cfg, out); break;
    case Experiment::diffusion: detail::run_diffusion(cfg, out); break;
    case Experiment::localization: detail::run_localization(cfg, out); break;
    case Experiment::entanglement: detail::run_entanglement(cfg, out); break;
    case Experiment::accel: detail::run_accel(cfg, out); break;
    case Experiment::protocol: detail::run_protocol_experiment(cfg, out); break;
    case Experiment::validate: m.validation_passed = detail::run_validate(out); break;
  }
  m.files = out.files();
  m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_atomic(out.dir() / "manifest.json", to_json(m).dump(1) + '\n');
  return m;
}

}  // namespace kickchain
