#include <gtest/gtest.h>

#include "kickchain/config.hpp"

namespace kickchain {
namespace {

std::string error_key(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

TEST(ParseConfig, EmptyTextGivesFig1Defaults) {
  const auto cfg = parse_config("");
  EXPECT_EQ(cfg.chain.n_sites, 1401);
  EXPECT_EQ(cfg.chain.center, 701);
  EXPECT_EQ(cfg.chain.beta, 100.0);
  EXPECT_EQ(cfg.chain.b_q, 1.0 / 15.0);
  EXPECT_EQ(cfg.chain.boundary, Boundary::open);
  EXPECT_EQ(cfg.engine, Engine::transform);
  EXPECT_EQ(cfg, ExperimentConfig{});
}

TEST(ParseConfig, ReadsKeysCommentsAndWhitespace) {
  const auto cfg = parse_config(
      "# localization run\n"
      "experiment = localization\n"
      "  beta=20   # 2 J T0\n"
      "b_q = 0.5\r\n"
      "\n"
      "n_periods = 2000\n"
      "engine = dense\n"
      "n_sites = 401\n"
      "seed = 18446744073709551615\n"
      "format = json\n");
  EXPECT_EQ(cfg.experiment, Experiment::localization);
  EXPECT_EQ(cfg.chain.beta, 20.0);
  EXPECT_EQ(cfg.chain.b_q, 0.5);
  EXPECT_EQ(cfg.n_periods, 2000);
  EXPECT_EQ(cfg.engine, Engine::dense);
  EXPECT_EQ(cfg.chain.center, 201);
  EXPECT_EQ(cfg.seed, 18446744073709551615ull);
  EXPECT_EQ(cfg.format, OutputFormat::json);
}

TEST(ParseConfig, ErrorsNameTheKey) {
  EXPECT_EQ(error_key("b_q = -1"), "b_q");
  EXPECT_EQ(error_key("colour = red"), "colour");
  EXPECT_EQ(error_key("n_sites = twelve"), "n_sites");
  EXPECT_EQ(error_key("n_sites = 12.5"), "n_sites");
  EXPECT_EQ(error_key("beta = 1e999"), "beta");
  EXPECT_EQ(error_key("beta = nan"), "beta");
  EXPECT_EQ(error_key("center = 2000"), "center");
  EXPECT_EQ(error_key("record_every = 0"), "record_every");
  EXPECT_EQ(error_key("n_periods = -3"), "n_periods");
  EXPECT_EQ(error_key("seed = -1"), "seed");
  EXPECT_EQ(error_key("engine = gpu"), "engine");
  EXPECT_EQ(error_key("boundary = ring"), "engine");
  EXPECT_EQ(error_key("beta = 1\nbeta = 2"), "beta");
  EXPECT_EQ(error_key("experiment = fig3"), "experiment");
  EXPECT_THROW(parse_config("just words"), ConfigError);
}

TEST(ParseConfig, RoundTrip) {
  for (std::string_view text :
       {"", "beta = 66.66666666666667\nb_q = 0.1\nn_sites = 2801", "boundary = ring\nengine = dense\nn_sites = 64",
        "b_q = 0.0666666666666667\noutput_dir = runs/a b\nensemble = 400000"}) {
    const auto a = parse_config(text);
    const auto b = parse_config(serialize(a));
    EXPECT_EQ(a, b);
    EXPECT_EQ(serialize(a), serialize(b));
  }
}

}  // namespace
}  // namespace kickchain
