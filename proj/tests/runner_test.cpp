#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kickchain/runner.hpp"

namespace kickchain {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class RunnerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kickchain_runner_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  ExperimentConfig config(std::string_view text, const std::string& sub = "a") {
    auto cfg = parse_config(text);
    cfg.output_dir = (dir_ / sub).string();
    return cfg;
  }

  fs::path dir_;
};

TEST(FormatNumber, TwelveSignificantDigits) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(701.0), "701");
  EXPECT_EQ(format_number(1.5e-20), "1.5e-20");
}

TEST(Sha256, KnownDigest) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(RunnerTest, Fig1ModesAndDistribution) {
  const auto m = run_experiment(config("experiment = fig1\nn_periods = 6"));
  ASSERT_EQ(m.files.size(), 2u);
  const auto modes = nlohmann::json::parse(slurp(dir_ / "a" / "modes.json"));
  EXPECT_NEAR(modes["hop_per_period"].get<double>(), 94.0, 2.0);
  const auto& r3 = modes["reports"][2];
  EXPECT_EQ(r3["pulse_index"], 3);
  EXPECT_EQ(r3["modes"].size(), 2u);
  EXPECT_GT(r3["total_mode_weight"].get<double>(), 0.25);

  const auto csv = slurp(dir_ / "a" / "distribution.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "period,site,probability");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 7 * 1401);
}

TEST_F(RunnerTest, ManifestEchoesConfigAndDigests) {
  const auto cfg = config("experiment = entanglement\nn_periods = 4\nbeta = 20\nb_q = 0.5\nn_sites = 301");
  run_experiment(cfg);
  const auto man = nlohmann::json::parse(slurp(dir_ / "a" / "manifest.json"));
  EXPECT_EQ(man["version"], std::string(kVersion));
  EXPECT_EQ(man["config"]["beta"], 20.0);
  const auto d = derived_params(cfg.chain);
  EXPECT_EQ(man["derived_params"]["k_s"].get<double>(), d.k_s);
  EXPECT_EQ(man["derived_params"]["localization_length"].get<double>(), d.localization_length);
  ASSERT_EQ(man["files"].size(), 1u);
  EXPECT_EQ(man["files"][0]["name"], "measures.csv");
  EXPECT_EQ(man["files"][0]["sha256"], sha256_hex(slurp(dir_ / "a" / "measures.csv")));
  EXPECT_FALSE(fs::exists(dir_ / "a" / "measures.csv.tmp"));
}

TEST_F(RunnerTest, SameConfigSameBytes) {
  for (std::string_view text : {"experiment = diffusion\nbeta = 100\nb_q = 0.05\nn_periods = 10\nseed = 4",
                                "experiment = accel\nn_periods = 5", "experiment = protocol\nn_periods = 4"}) {
    const auto a = run_experiment(config(text, "x"));
    const auto b = run_experiment(config(text, "y"));
    ASSERT_EQ(a.files.size(), b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
      EXPECT_EQ(a.files[i].sha256, b.files[i].sha256) << text;
      EXPECT_EQ(slurp(dir_ / "x" / a.files[i].name), slurp(dir_ / "y" / b.files[i].name));
    }
  }
}

TEST_F(RunnerTest, SeedOnlyChangesClassicalEnsemble) {
  const auto a = run_experiment(config("experiment = diffusion\nb_q = 0.05\nn_periods = 10\nseed = 1", "x"));
  const auto b = run_experiment(config("experiment = diffusion\nb_q = 0.05\nn_periods = 10\nseed = 2", "y"));
  EXPECT_EQ(a.files[0].sha256, b.files[0].sha256);  // variance.csv
  EXPECT_NE(a.files[1].sha256, b.files[1].sha256);  // diffusion.json
}

TEST_F(RunnerTest, DiffusionSlopeTracksClassicalColumn) {
  run_experiment(config("experiment = diffusion\nbeta = 100\nb_q = 0.05\nn_periods = 10"));
  std::ifstream is(dir_ / "a" / "variance.csv");
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "period,variance,classical_prediction");
  std::vector<double> t, v, c;
  while (std::getline(is, line)) {
    double a, b, d;
    char comma;
    std::istringstream ls(line);
    ls >> a >> comma >> b >> comma >> d;
    t.push_back(a);
    v.push_back(b);
    c.push_back(d);
  }
  ASSERT_EQ(t.size(), 11u);
  const double qs = detail::fit_line({t.begin() + 1, t.end()}, {v.begin() + 1, v.end()}).slope;
  const double cs = detail::fit_line(t, c).slope;
  EXPECT_NEAR(qs / cs, 1.0, 0.15);
}

TEST_F(RunnerTest, LocalizationWritesProfileAndFit) {
  run_experiment(config("experiment = localization\nbeta = 20\nb_q = 0.5\nn_periods = 400\naverage_window = 100"));
  const auto fit = nlohmann::json::parse(slurp(dir_ / "a" / "fit.json"));
  EXPECT_TRUE(fit["localized"].get<bool>());
  EXPECT_EQ(fit["averaged_periods"], 100);
  const auto csv = slurp(dir_ / "a" / "profile.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "site,log_probability");
}

TEST_F(RunnerTest, JsonFormatAndValidationExperiment) {
  const auto m = run_experiment(config("experiment = evolve\nn_periods = 2\nformat = json\nn_sites = 101"));
  EXPECT_EQ(m.files[0].name, "distribution.json");
  const auto j = nlohmann::json::parse(slurp(dir_ / "a" / "distribution.json"));
  EXPECT_EQ(j["probability"].size(), 3u * 101u);
}

TEST_F(RunnerTest, CapacityErrorsPropagate) {
  EXPECT_THROW(run_experiment(config("engine = dense\nn_sites = 5000")), CapacityError);
}

TEST(ValidateSuite, FreshBuildPasses) {
  const auto rep = validate_suite();
  for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << " deviation " << c.deviation;
  EXPECT_TRUE(rep.passed());
  EXPECT_GE(rep.checks.size(), 11u);
}

// A flipped kick only conjugates the dynamics up to the staggering
// (-1)^s and a global phase, so |psi|^2 and the hop are unchanged: the
// amplitude-level engine comparison is what catches it.
TEST(ValidateSuite, KickSignMutationIsCaught) {
  const auto rep = validate_suite({.inject_kick_sign_error = true});
  EXPECT_FALSE(rep.passed());
  for (const auto& c : rep.checks) {
    if (c.name == "dense_vs_transform_engine") {
      EXPECT_FALSE(c.passed);
    }
    if (c.name == "fig1_hop") {
      EXPECT_TRUE(c.passed);
    }
  }
  const auto good = measure_fig1_hop(false), bad = measure_fig1_hop(true);
  EXPECT_NEAR(good.advance, bad.advance, 1e-9);
}

}  // namespace
}  // namespace kickchain
