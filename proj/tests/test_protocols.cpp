#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qst/errors.hpp"
#include "qst/protocols.hpp"
#include "qst/robustness.hpp"
#include "support/oracle.hpp"

using namespace qst;

namespace {

const Complex kI{0.0, 1.0};

AncillaState zeros(int n) { return AncillaState::pure(basis_vector(Index{1} << n, 0)); }

// Naive assembly: SWAP_{0,L-1} (Pi + H_0 (I - Pi)) with Pi on the middle sites.
Matrix naive_saturating(int n, const Matrix& pi_mid, const Matrix& h) {
  const Index dim = Index{1} << n;
  const Matrix pi = oracle::kron(oracle::kron(Matrix::Identity(2, 2), pi_mid), Matrix::Identity(2, 2));
  const Matrix h0 = oracle::single_site(h, 0, n, 2);
  const Matrix sw = oracle::embed(swap_gate(2), {0, n - 1}, n, 2);
  return sw * (pi + h0 * (Matrix::Identity(dim, dim) - pi));
}

}  // namespace

TEST(Saturating, ThreeSitesMatchesNaiveAssembly) {
  const auto cfg = LatticeConfig::chain(3);
  const auto s_prime = projector_all_zero(1, 2);
  const auto p = build_saturating(cfg, s_prime);
  EXPECT_TRUE(p.unitary.is_unitary());
  EXPECT_EQ(p.declared_subspace.dim(), 2);
  EXPECT_EQ(p.declared_subspace.ambient_dim(), 4);
  EXPECT_LE(oracle::max_abs(p.unitary.matrix() -
                            naive_saturating(3, s_prime.projector(), hadamard(2).matrix())),
            1e-14);
  for (int b = 0; b < 2; ++b) {
    const auto anc = AncillaState::pure(p.declared_subspace.vector(b));
    EXPECT_TRUE(verify_transfer(p.unitary, anc, cfg, 1e-12).pass);
  }
}

TEST(Saturating, StabilizerForm) {
  for (int n : {3, 4, 5}) {
    const auto cfg = LatticeConfig::chain(n);
    const auto s_prime = projector_all_zero(n - 2, 2);
    const auto pair = extract_stabilizers(build_saturating(cfg, s_prime).unitary, cfg);
    const Index mid = Index{1} << (n - 2);
    const Matrix pi = s_prime.projector();
    const Matrix pibar = Matrix::Identity(mid, mid) - pi;
    const Matrix expected = oracle::kron(oracle::kron(Matrix::Identity(2, 2), pi), Matrix::Identity(2, 2)) -
                            kI * oracle::kron(oracle::kron(pauli_y(), pibar), Matrix::Identity(2, 2));
    EXPECT_LE(oracle::max_abs(pair.s_x.matrix() - expected), 1e-9) << n;
  }
}

TEST(Saturating, TwoSitesIsSwap) {
  const auto cfg = LatticeConfig::chain(2);
  const auto p = build_saturating(cfg, SubspaceBasis::trivial());
  EXPECT_LE(oracle::max_abs(p.unitary.matrix() - swap_gate(2)), 1e-15);
  EXPECT_EQ(p.declared_subspace.dim(), 2);
}

TEST(Saturating, FullMiddleSpaceIsStateIndependentSwap) {
  const auto cfg = LatticeConfig::chain(3);
  const auto p = build_saturating(cfg, projector_full(1, 2));
  EXPECT_LE(oracle::max_abs(p.unitary.matrix() - oracle::embed(swap_gate(2), {0, 2}, 3, 2)), 1e-15);
  EXPECT_EQ(p.declared_subspace.dim(), 4);
}

TEST(Saturating, RejectsWrongRegister) {
  const auto cfg = LatticeConfig::chain(4);
  EXPECT_THROW(build_saturating(cfg, projector_all_zero(3, 2)), ValidationError);
  EXPECT_THROW(build_saturating(LatticeConfig::chain(3, 3), projector_all_zero(1, 3)),
               ValidationError);
}

TEST(Saturating, DeclaredBasisTransfers) {
  std::mt19937_64 rng(77);
  for (int n : {3, 4, 5}) {
    const auto cfg = LatticeConfig::chain(n);
    const Index mid = Index{1} << (n - 2);
    const auto s_prime = projector_span({oracle::random_state(mid, rng), oracle::random_state(mid, rng)});
    const auto p = build_saturating(cfg, s_prime);
    EXPECT_EQ(p.declared_subspace.dim(), 2 * s_prime.dim());
    for (Index k = 0; k < p.declared_subspace.dim(); ++k) {
      const auto r = verify_transfer(p.unitary, AncillaState::pure(p.declared_subspace.vector(k)), cfg, 1e-9);
      EXPECT_TRUE(r.pass) << n << " " << k << " " << r.worst_fidelity;
    }
    EXPECT_TRUE(verify_transfer(p.unitary, AncillaState::uniform_mixture(p.declared_subspace), cfg, 1e-9).pass);
  }
}

TEST(QuditSaturating, QubitCaseMatchesQubitBuilder) {
  std::mt19937_64 rng(3);
  const auto cfg = LatticeConfig::chain(4);
  const auto s_prime = projector_span({oracle::random_state(4, rng)});
  const auto a = build_saturating(cfg, s_prime);
  const auto b = build_qudit_saturating(cfg, s_prime);
  EXPECT_LE(oracle::max_abs(a.unitary.matrix() - b.unitary.matrix()), 1e-14);
}

TEST(QuditSaturating, QutritTransfersOnDeclaredSubspace) {
  const auto cfg = LatticeConfig::chain(3, 3);
  const auto p = build_qudit_saturating(cfg, projector_all_zero(1, 3));
  EXPECT_EQ(p.declared_subspace.dim(), 3);
  for (Index k = 0; k < 3; ++k) {
    EXPECT_TRUE(verify_transfer(p.unitary, AncillaState::pure(p.declared_subspace.vector(k)), cfg, 1e-9).pass);
  }
}

TEST(QuditSaturating, TwoSiteFourLevelIsSwap) {
  const auto cfg = LatticeConfig::chain(2, 4);
  const auto p = build_qudit_saturating(cfg, SubspaceBasis::trivial());
  EXPECT_LE(oracle::max_abs(p.unitary.matrix() - swap_gate(4)), 1e-14);
  EXPECT_TRUE(verify_transfer(p.unitary, AncillaState::pure(basis_vector(4, 3)), cfg, 1e-12).pass);
}

TEST(Swap, AnyAncillaTransfers) {
  const auto cfg = LatticeConfig::chain(3);
  const auto p = build_swap(cfg);
  EXPECT_EQ(p.declared_subspace.dim(), 4);
  std::mt19937_64 rng(9);
  EXPECT_TRUE(verify_transfer(p.unitary, AncillaState::pure(oracle::random_state(4, rng)), cfg, 1e-12).pass);
}

TEST(UReset, TableRows) {
  const Matrix u = build_u_reset().matrix();
  EXPECT_LE(unitarity_defect(u), 1e-12);
  EXPECT_LE(oracle::max_abs(u * basis_vector(8, 0b111) - basis_vector(8, 0b011)), 1e-12);
  EXPECT_LE(oracle::max_abs(u * basis_vector(8, 0b000) - basis_vector(8, 0b000)), 1e-12);
  Vector w = Vector::Zero(8);
  w(0b001) = w(0b010) = w(0b100) = 1.0 / std::sqrt(3.0);
  EXPECT_LE(oracle::max_abs(u * w - basis_vector(8, 0b001)), 1e-12);
}

TEST(UReset, SymmetricInputsResetFirstQubit) {
  const Matrix u = build_u_reset().matrix();
  std::mt19937_64 rng(21);
  const auto dicke = dicke_states3();
  ASSERT_EQ(dicke.size(), 4u);
  for (int trial = 0; trial < 20; ++trial) {
    Vector in = Vector::Zero(8);
    for (const auto& d : dicke) in += Complex(std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng)) * d;
    in /= in.norm();
    const Vector out = u * in;
    const Matrix rho = reduced_density(out, {0}, 3, 2);
    EXPECT_LE(oracle::max_abs(rho - basis_vector(2, 0) * basis_vector(2, 0).adjoint()), 1e-12);
  }
}

TEST(FastGhz, TwoSitesIsCnotPair) {
  const auto cfg = LatticeConfig::chain(2);
  const auto p = build_fast_ghz(cfg);
  const Matrix c01 = cnot_gate();
  const Matrix c10 = oracle::embed(cnot_gate(), {1, 0}, 2, 2);
  EXPECT_LE(oracle::max_abs(p.unitary.matrix() - c10 * c01), 1e-14);
  EXPECT_TRUE(verify_transfer(p.unitary, zeros(1), cfg, 1e-12).pass);
}

TEST(FastGhz, TransfersWithZeroAncillas) {
  for (int n : {4, 6}) {
    const auto cfg = LatticeConfig::chain(n);
    const auto p = build_fast_ghz(cfg);
    EXPECT_EQ(p.declared_subspace.dim(), 1);
    EXPECT_TRUE(verify_transfer(p.unitary, zeros(n - 1), cfg, 1e-9).pass) << n;
  }
}

TEST(FastGhz, RejectsOddChains) {
  EXPECT_THROW(build_fast_ghz(LatticeConfig::chain(5)), ValidationError);
  EXPECT_THROW(build_fast_ghz(LatticeConfig::chain(4, 3)), ValidationError);
}

TEST(GhzBridge, MatchesNaiveGateProduct) {
  // Left {0,1}, right {2,3} on four qubits.
  const int n = 4;
  const Matrix h = hadamard(2).matrix();
  const Matrix cp = controlled_phase_gate(std::numbers::pi / 4.0);
  auto g = [&](const Matrix& m, std::vector<int> s) { return oracle::embed(m, s, n, 2); };
  std::vector<Matrix> seq = {g(cnot_gate(), {0, 1}), g(h, {3}), g(cnot_gate(), {3, 2})};
  auto phases = [&] {
    for (int a : {0, 1}) {
      for (int b : {2, 3}) seq.push_back(g(cp, {a, b}));
    }
  };
  phases();
  seq.insert(seq.end(), {g(cnot_gate(), {3, 2}), g(h, {3}), g(cnot_gate(), {3, 2})});
  seq.insert(seq.end(), {g(cnot_gate(), {0, 1}), g(h, {0}), g(cnot_gate(), {0, 1})});
  phases();
  seq.insert(seq.end(), {g(cnot_gate(), {0, 1}), g(h, {0}), g(cnot_gate(), {3, 2})});
  Matrix expected = Matrix::Identity(16, 16);
  for (const auto& m : seq) expected = m * expected;

  Matrix u = Matrix::Identity(16, 16);
  append_ghz_bridge({0, 1, 2, 3}, n, u);
  EXPECT_LE(oracle::max_abs(u - expected), 1e-13);
}

TEST(Symmetrized, FourSitesTransfersOnSymmetricGroup) {
  const auto cfg = LatticeConfig::chain(4);
  const auto p = build_symmetrized(cfg);
  EXPECT_EQ(p.declared_subspace.dim(), 4);
  for (Index k = 0; k < 4; ++k) {
    EXPECT_TRUE(verify_transfer(p.unitary, AncillaState::pure(p.declared_subspace.vector(k)), cfg, 1e-9).pass);
  }
  EXPECT_THROW(build_symmetrized(LatticeConfig::chain(6)), ValidationError);
}

TEST(BridgingCost, DirectTerm) {
  const auto c = bridging_cost(1e4, 1.75, 0.8, 1.0);
  EXPECT_NEAR(c.term("t_direct"), std::pow(10.0, 0.6), 1e-12);
  EXPECT_NEAR(c.term("t_direct"), 3.98107170553, 1e-9);
  EXPECT_NEAR(c.term("t_GHZ"), 0.8 * std::log(1e4), 1e-12);
  EXPECT_TRUE(c.in_regime);
  double sum = 0.0;
  for (const auto& t : c.terms) sum += t.second;
  EXPECT_DOUBLE_EQ(c.total, sum);
  EXPECT_THROW((void)c.term("t_reset"), ValidationError);
}

TEST(BridgingCost, BalancedExponentIsConstant) {
  for (double l : {10.0, 1e3, 1e6}) EXPECT_NEAR(bridging_cost(l, 1.8, 0.9, 1.0).term("t_direct"), 1.0, 1e-12);
}

TEST(BridgingCost, DirectStepDominatesWhenAlphaAboveTwoBeta) {
  const auto c = bridging_cost(1e12, 1.9, 0.8, 1.0);
  EXPECT_NEAR(c.total / (2.0 * c.term("t_direct")), 1.0, 0.02);
}

TEST(BridgingCost, FlagsAndErrors) {
  EXPECT_FALSE(bridging_cost(100, 2.5, 0.8, 1.0).in_regime);
  EXPECT_THROW(bridging_cost(0.0, 1.75, 0.8, 1.0), ValidationError);
  EXPECT_THROW(bridging_cost(100, 1.75, 0.0, 1.0), ValidationError);
}

TEST(SublatticeCost, Examples) {
  EXPECT_NEAR(sublattice_cost(1e4, 1, 1.75, 2.0).total, std::pow(std::log(1e4), 2.0), 1e-12);
  const auto c = sublattice_cost(1e4, 4, 1.75, 1.0);
  EXPECT_NEAR(c.total, std::pow(4.0, 1.75) * std::log(1e4), 1e-12);
  EXPECT_NEAR(c.total, 104.2, 0.01);
  EXPECT_NEAR(sublattice_lower_bound(1e4, 4, 1.75), 2.0 * std::pow(1e4, -0.25), 1e-15);
  EXPECT_THROW(sublattice_cost(4, 4, 1.75, 1.0), ValidationError);
  EXPECT_THROW(sublattice_cost(10, 0.5, 1.75, 1.0), ValidationError);
}
