#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "kickchain/chain.hpp"
#include "kickchain/errors.hpp"
#include "kickchain/params.hpp"

namespace kickchain {

enum class Experiment { evolve, fig1, diffusion, localization, entanglement, accel, protocol, validate };
enum class OutputFormat { csv, json };

inline constexpr std::array<std::pair<Experiment, std::string_view>, 8> kExperimentNames{{
    {Experiment::evolve, "evolve"},
    {Experiment::fig1, "fig1"},
    {Experiment::diffusion, "diffusion"},
    {Experiment::localization, "localization"},
    {Experiment::entanglement, "entanglement"},
    {Experiment::accel, "accel"},
    {Experiment::protocol, "protocol"},
    {Experiment::validate, "validate"},
}};

inline std::string_view to_string(Experiment e) {
  for (const auto& [k, name] : kExperimentNames)
    if (k == e) return name;
  return "?";
}

inline std::optional<Experiment> parse_experiment(std::string_view s) {
  for (const auto& [k, name] : kExperimentNames)
    if (name == s) return k;
  return std::nullopt;
}

inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

inline constexpr int kMaxPeriods = 1'000'000;
inline constexpr int kMaxEnsemble = 100'000'000;

struct ExperimentConfig {
  Experiment experiment = Experiment::evolve;
  ChainParams chain;
  int n_periods = 6;
  int record_every = 1;
  Engine engine = Engine::transform;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  OutputFormat format = OutputFormat::csv;
  // classical ensemble size for the diffusion experiment
  int ensemble = 10'000;
  // trailing periods averaged before the localization fit
  int average_window = 200;

  void validate() const {
    chain.validate();
    if (n_periods < 0 || n_periods > kMaxPeriods)
      throw ConfigError("n_periods must be in [0, " + std::to_string(kMaxPeriods) + "]", "n_periods");
    if (record_every < 1 || record_every > kMaxPeriods)
      throw ConfigError("record_every must be in [1, " + std::to_string(kMaxPeriods) + "]", "record_every");
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty", "output_dir");
    if (ensemble < 1 || ensemble > kMaxEnsemble)
      throw ConfigError("ensemble must be in [1, " + std::to_string(kMaxEnsemble) + "]", "ensemble");
    if (average_window < 1 || average_window > kMaxPeriods)
      throw ConfigError("average_window must be in [1, " + std::to_string(kMaxPeriods) + "]", "average_window");
    if (chain.boundary == Boundary::ring && engine == Engine::transform)
      throw ConfigError("ring boundary is only supported by the dense engine", "engine");
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec == std::errc::result_out_of_range)
    throw ConfigError(std::string(key) + ": value '" + std::string(value) + "' out of range", std::string(key));
  if (ec != std::errc{} || ptr != end)
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(value) + "'", std::string(key));
  return out;
}

// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), r.ptr};
}

}  // namespace detail

// Parses `key = value` lines; `#` starts a comment. Unknown or repeated keys,
// malformed values and out-of-range values raise ConfigError naming the key.
// Missing keys keep their defaults; when n_sites is given without center the
// centre defaults to the middle site.
inline ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::map<std::string, std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing key");
    if (seen.count(key)) throw ConfigError(key + ": given more than once", key);
    seen.emplace(key, value);

    if (key == "experiment") {
      const auto e = parse_experiment(value);
      if (!e) throw ConfigError("experiment: unknown experiment '" + std::string(value) + "'", key);
      cfg.experiment = *e;
    } else if (key == "n_sites") {
      cfg.chain.n_sites = detail::parse_number<int>(key, value);
    } else if (key == "center") {
      cfg.chain.center = detail::parse_number<int>(key, value);
    } else if (key == "beta") {
      cfg.chain.beta = detail::parse_number<double>(key, value);
    } else if (key == "b_q") {
      cfg.chain.b_q = detail::parse_number<double>(key, value);
    } else if (key == "boundary") {
      if (value == "open") cfg.chain.boundary = Boundary::open;
      else if (value == "ring") cfg.chain.boundary = Boundary::ring;
      else throw ConfigError("boundary: expected open or ring", key);
    } else if (key == "n_periods") {
      cfg.n_periods = detail::parse_number<int>(key, value);
    } else if (key == "record_every") {
      cfg.record_every = detail::parse_number<int>(key, value);
    } else if (key == "engine") {
      if (value == "dense") cfg.engine = Engine::dense;
      else if (value == "transform") cfg.engine = Engine::transform;
      else throw ConfigError("engine: expected dense or transform", key);
    } else if (key == "seed") {
      cfg.seed = detail::parse_number<std::uint64_t>(key, value);
    } else if (key == "output_dir") {
      cfg.output_dir = std::string(value);
    } else if (key == "format") {
      if (value == "csv") cfg.format = OutputFormat::csv;
      else if (value == "json") cfg.format = OutputFormat::json;
      else throw ConfigError("format: expected csv or json", key);
    } else if (key == "ensemble") {
      cfg.ensemble = detail::parse_number<int>(key, value);
    } else if (key == "average_window") {
      cfg.average_window = detail::parse_number<int>(key, value);
    } else {
      throw ConfigError("unknown key '" + key + "'", key);
    }
  }
  if (seen.count("n_sites") && !seen.count("center")) cfg.chain.center = (cfg.chain.n_sites + 1) / 2;
  cfg.validate();
  return cfg;
}

// Every key, in a fixed order, with doubles in shortest round-trip form.
inline std::string serialize(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "experiment = " << to_string(cfg.experiment) << '\n'
     << "n_sites = " << cfg.chain.n_sites << '\n'
     << "center = " << cfg.chain.center << '\n'
     << "beta = " << detail::format_double(cfg.chain.beta) << '\n'
     << "b_q = " << detail::format_double(cfg.chain.b_q) << '\n'
     << "boundary = " << to_string(cfg.chain.boundary) << '\n'
     << "n_periods = " << cfg.n_periods << '\n'
     << "record_every = " << cfg.record_every << '\n'
     << "engine = " << to_string(cfg.engine) << '\n'
     << "seed = " << cfg.seed << '\n'
     << "output_dir = " << cfg.output_dir << '\n'
     << "format = " << to_string(cfg.format) << '\n'
     << "ensemble = " << cfg.ensemble << '\n'
     << "average_window = " << cfg.average_window << '\n';
  return os.str();
}

}  // namespace kickchain
