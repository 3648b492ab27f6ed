// kickchain <experiment> [--config FILE] [--set key=value ...] [--out DIR]
//
// Exit codes: 0 ok, 1 config error, 2 capacity error, 3 validation failure,
// 4 I/O or other runtime error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "kickchain/runner.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kCapacity = 2, kValidation = 3, kRuntime = 4 };

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw kickchain::ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulsed spin-chain / kicked-rotor experiments"};
  std::string experiment, config_file, out_dir;
  std::vector<std::string> overrides;
  std::string names;
  for (const auto& [e, name] : kickchain::kExperimentNames) names += (names.empty() ? "" : ", ") + std::string(name);
  app.add_option("experiment", experiment, "one of: " + names)->required();
  app.add_option("--config", config_file, "key = value configuration file");
  app.add_option("--set", overrides, "override a key, e.g. --set beta=20")->take_all();
  app.add_option("--out", out_dir, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    std::string text = config_file.empty() ? std::string{} : read_file(config_file);
    text += "\n";
    // Later lines win: drop earlier definitions of keys given on the command line.
    std::vector<std::string> keys{"experiment"};
    std::string extra = "experiment = " + experiment + "\n";
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw kickchain::ConfigError("--set expects key=value, got '" + kv + "'");
      keys.push_back(std::string(kickchain::detail::trim(std::string_view(kv).substr(0, eq))));
      extra += kv + "\n";
    }
    if (!out_dir.empty()) {
      keys.push_back("output_dir");
      extra += "output_dir = " + out_dir + "\n";
    }
    std::istringstream lines(text);
    std::string merged, line;
    while (std::getline(lines, line)) {
      const auto body = kickchain::detail::trim(std::string_view(line).substr(0, line.find('#')));
      const auto eq = body.find('=');
      const auto key = eq == std::string_view::npos ? std::string_view{} : kickchain::detail::trim(body.substr(0, eq));
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) merged += line + "\n";
    }
    const auto cfg = kickchain::parse_config(merged + extra);
    const auto manifest = kickchain::run_experiment(cfg);
    for (const auto& f : manifest.files) std::cout << cfg.output_dir << '/' << f.name << "  " << f.sha256 << '\n';
    std::cout << cfg.output_dir << "/manifest.json\n";
    if (manifest.validation_passed && !*manifest.validation_passed) {
      std::cerr << "validation failed; see " << cfg.output_dir << "/validation.json\n";
      return kValidation;
    }
    return kOk;
  } catch (const kickchain::ConfigError& e) {
    std::cerr << "config error" << (e.key().empty() ? "" : " [" + e.key() + "]") << ": " << e.what() << '\n';
    return kConfig;
  } catch (const kickchain::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kCapacity;
  } catch (const kickchain::DomainError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
