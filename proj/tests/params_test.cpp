#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kickchain/params.hpp"
#include "kickchain/qkr.hpp"

namespace kickchain {
namespace {

TEST(DerivedParams, FigureOneParameterSet) {
  ChainParams p;  // defaults: N = 1401, n0 = 701, beta = 100, B_Q = 1/15
  const auto d = derived_params(p);
  EXPECT_NEAR(d.k_s, 100.0 / 15.0, 1e-12);
  EXPECT_NEAR(d.hop_distance, 94.2477796, 1e-6);
  EXPECT_NEAR(d.hbar_eff, 1.0 / 15.0, 1e-15);
  EXPECT_NEAR(d.hop_distance * p.b_q, 2.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(d.localization_length, d.k_s * d.k_s / (4.0 * p.b_q * p.b_q), 1e-9);
}

TEST(DerivedParams, ZeroCoupling) {
  ChainParams p;
  p.beta = 0;
  p.b_q = 0.1;
  const auto d = derived_params(p);
  EXPECT_EQ(d.k_s, 0.0);
  EXPECT_EQ(d.localization_length, 0.0);
}

TEST(DerivedParams, AlphaInsideAcceleratorWindow) {
  ChainParams p;
  const auto d = derived_params(p);
  // 100/15 / 2pi
  EXPECT_NEAR(d.alpha, 1.0610329539, 1e-9);
  EXPECT_TRUE(accelerator_window(d.k_s).inside);
}

TEST(ChainParams, Validation) {
  ChainParams p;
  p.center = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  p.center = 1402;
  EXPECT_THROW(p.validate(), ConfigError);
  p = ChainParams{};
  p.b_q = -1;
  try {
    p.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "b_q");
  }
  p = ChainParams{};
  p.beta = NAN;
  EXPECT_THROW(p.validate(), ConfigError);
}

}  // namespace
}  // namespace kickchain
