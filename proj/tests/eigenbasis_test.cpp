#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <random>

#include "kickchain/chain.hpp"
#include "kickchain/eigenbasis.hpp"
#include "oracles.hpp"

namespace kickchain {
namespace {

ChainParams open_chain(int n, double beta) {
  ChainParams p;
  p.n_sites = n;
  p.center = (n + 1) / 2;
  p.beta = beta;
  return p;
}

TEST(EigenBasis, FirstModeIsUniform) {
  const auto g = build_eigenbasis(open_chain(4, 1.0)).mode_vectors();
  for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(g(0, j), 0.5);
}

TEST(EigenBasis, OrthonormalForManySizes) {
  for (int n : {2, 3, 5, 16, 64, 101, 256}) {
    const auto g = build_eigenbasis(open_chain(n, 1.0)).mode_vectors();
    const Eigen::MatrixXd gram = g.transpose() * g;
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10) << "N = " << n;
  }
}

TEST(EigenBasis, PhasesNondecreasing) {
  const auto b = build_eigenbasis(open_chain(300, 7.0));
  const auto& phi = b.eigenphases();
  EXPECT_EQ(phi.front(), 0.0);
  for (std::size_t m = 1; m < phi.size(); ++m) EXPECT_GE(phi[m], phi[m - 1]);
}

TEST(EigenBasis, MatchesDiagonalizedHamiltonian) {
  const auto p = open_chain(64, 10.0);
  const auto b = build_eigenbasis(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle_hamiltonian(p));
  const Eigen::VectorXd ev = es.eigenvalues();  // ascending
  const double shift = ev(0);
  for (int m = 0; m < 64; ++m) EXPECT_NEAR(ev(m) - shift, b.eigenphases()[static_cast<std::size_t>(m)], 1e-10);

  // The spectrum is nondegenerate, so eigenvectors agree up to sign.
  const auto g = b.mode_vectors();
  for (int m = 0; m < 64; ++m) {
    const double overlap = std::abs(g.row(m).dot(es.eigenvectors().col(m)));
    EXPECT_GT(overlap, 1.0 - 1e-10) << "mode " << m + 1;
  }
}

TEST(EigenBasis, FastTransformMatchesModeMatrix) {
  const int n = 97;
  const auto b = build_eigenbasis(open_chain(n, 3.0));
  const auto g = b.mode_vectors();
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto psi = oracle::random_state(n, rng);
    const auto fast = b.to_modes(psi);
    const auto slow = oracle::apply(g.cast<cplx>(), psi);
    for (int m = 0; m < n; ++m) EXPECT_LT(std::abs(fast[static_cast<std::size_t>(m)] - slow.amplitudes()[static_cast<std::size_t>(m)]), 1e-12);
    EXPECT_LT(max_abs_diff(b.from_modes(fast), psi), 1e-12);
  }
}

TEST(EigenBasis, RejectsTinyChainAndRing) {
  EXPECT_THROW(build_eigenbasis(open_chain(1, 1.0)), DomainError);
  auto ring = open_chain(16, 1.0);
  ring.boundary = Boundary::ring;
  EXPECT_THROW(build_eigenbasis(ring), ConfigError);
}

TEST(OracleHamiltonian, TwoSiteGap) {
  ChainParams p = open_chain(2, 2.0);  // J T0 = 1
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle_hamiltonian(p));
  EXPECT_NEAR(es.eigenvalues()(1) - es.eigenvalues()(0), 2.0, 1e-14);
  EXPECT_TRUE(oracle_hamiltonian(p).isApprox(oracle_hamiltonian(p).transpose()));
}

TEST(OracleHamiltonian, CapacityError) {
  EXPECT_THROW(oracle_hamiltonian(open_chain(100, 1.0), 50), CapacityError);
}

}  // namespace
}  // namespace kickchain
