#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qtele/fidelity.hpp"
#include "qtele/protocol.hpp"
#include "qtele/search.hpp"
#include "support/oracles.hpp"

using namespace qtele;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

SchmidtDecomposition uniform(int d) {
  return SchmidtDecomposition::canonical(
      std::vector<double>(static_cast<std::size_t>(d), 1.0 / std::sqrt(double(d))));
}

SchmidtDecomposition product(int d) {
  std::vector<double> l(static_cast<std::size_t>(d), 0.0);
  l[0] = 1.0;
  return SchmidtDecomposition::canonical(l);
}

Operator pauli(char which) {
  Operator m = Operator::Zero(2, 2);
  switch (which) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'Z': m << 1, 0, 0, -1; break;
    case 'X': m << 0, 1, 1, 0; break;
  }
  return m;
}

// Product basis |i> (x) |k'>: phi_r^k = delta_{k k'} |i>. Complete, orthogonal,
// unequal norms.
AliceMeasurement product_basis_measurement(int d) {
  std::vector<CMatrix> blocks;
  for (int i = 0; i < d; ++i) {
    for (int kp = 0; kp < d; ++kp) {
      CMatrix b = CMatrix::Zero(d, d);
      b(i, kp) = 1.0;
      blocks.push_back(b);
    }
  }
  return AliceMeasurement(d, blocks);
}

// |i> (x) |+-> for d = 2: phi_r^0 = |i>/sqrt2 = +-phi_r^1. Complete, equal
// norms, not orthogonal.
AliceMeasurement parallel_vectors_measurement() {
  std::vector<CMatrix> blocks;
  for (int i = 0; i < 2; ++i) {
    for (double sign : {1.0, -1.0}) {
      CMatrix b = CMatrix::Zero(2, 2);
      b(i, 0) = kInvSqrt2;
      b(i, 1) = sign * kInvSqrt2;
      blocks.push_back(b);
    }
  }
  return AliceMeasurement(2, blocks);
}

}  // namespace

TEST(StandardMeasurement, QubitVectors) {
  const auto m = standard_measurement(2);
  ASSERT_EQ(m.outcomes(), 4);
  // r = 0: phi^0 = |0>/sqrt2, phi^1 = |1>/sqrt2
  EXPECT_NEAR(std::abs(m.phi(0, 0)[0] - kInvSqrt2), 0.0, 1e-15);
  EXPECT_EQ(m.phi(0, 0)[1], Complex(0.0));
  EXPECT_NEAR(std::abs(m.phi(0, 1)[1] - kInvSqrt2), 0.0, 1e-15);
  // r = 1 (p = 1, q = 0): phi^1 = -|1>/sqrt2
  EXPECT_NEAR(std::abs(m.phi(1, 0)[0] - kInvSqrt2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m.phi(1, 1)[1] + kInvSqrt2), 0.0, 1e-15);
  // r = 2 (p = 0, q = 1): phi^0 = |1>/sqrt2
  EXPECT_NEAR(std::abs(m.phi(2, 0)[1] - kInvSqrt2), 0.0, 1e-15);
}

TEST(StandardMeasurement, CompleteForManyDimensions) {
  for (int d = 2; d <= 8; ++d) {
    const auto rep = validate_completeness(standard_measurement(d), 1e-12);
    EXPECT_TRUE(rep.pass) << "d=" << d;
    EXPECT_LT(rep.max_error, 1e-12);
  }
}

TEST(ValidateCompleteness, FlagsScaledVector) {
  std::vector<CMatrix> blocks = standard_measurement(2).blocks();
  blocks[1].col(1) *= 1.01;
  const auto rep = validate_completeness(AliceMeasurement(2, blocks));
  EXPECT_FALSE(rep.pass);
  EXPECT_EQ(rep.worst_k, 1);
  EXPECT_EQ(rep.worst_l, 1);
  EXPECT_NEAR(rep.max_error, (1.01 * 1.01 - 1.0) / 2.0, 1e-12);
}

TEST(ValidateCompleteness, SingleOutcomeIdentityIsIncomplete) {
  // phi_0^k = |k>: sum_r |phi_r^k><phi_r^l| = |k><l|, not delta_kl 1.
  const auto rep = validate_completeness(AliceMeasurement(2, {CMatrix::Identity(2, 2)}));
  EXPECT_FALSE(rep.pass);
  EXPECT_NEAR(rep.max_error, 1.0, 1e-15);
}

TEST(ValidateCompleteness, OrthonormalJointBasisPasses) {
  EXPECT_TRUE(validate_completeness(product_basis_measurement(3)).pass);
  EXPECT_TRUE(validate_completeness(parallel_vectors_measurement()).pass);
}

TEST(CheckOptimality, StandardPassesForAnyLambda) {
  SeededRng rng(3);
  for (int d = 2; d <= 5; ++d) {
    EXPECT_TRUE(check_optimality(standard_measurement(d), uniform(d)).pass);
    EXPECT_TRUE(check_optimality(standard_measurement(d), product(d)).pass);
    const auto l = oracle::random_lambdas(d, rng);
    EXPECT_TRUE(check_optimality(standard_measurement(d),
                                 SchmidtDecomposition::canonical(l)).pass);
  }
}

TEST(CheckOptimality, FlagsNonOrthogonalPair) {
  const auto rep = check_optimality(parallel_vectors_measurement(), uniform(2));
  EXPECT_FALSE(rep.pass);
  EXPECT_TRUE(rep.has(ViolationKind::NonOrthogonal));
  EXPECT_FALSE(rep.has(ViolationKind::UnequalNorm));
  EXPECT_FALSE(rep.has(ViolationKind::Completeness));
  EXPECT_EQ(rep.violations.size(), 4u);
}

TEST(CheckOptimality, FlagsUnequalNorms) {
  const auto rep = check_optimality(product_basis_measurement(2), uniform(2));
  EXPECT_FALSE(rep.pass);
  EXPECT_TRUE(rep.has(ViolationKind::UnequalNorm));
  EXPECT_FALSE(rep.has(ViolationKind::NonOrthogonal));
  EXPECT_FALSE(rep.has(ViolationKind::Completeness));
}

TEST(CheckOptimality, FlagsBrokenCompleteness) {
  std::vector<CMatrix> blocks = standard_measurement(3).blocks();
  blocks[0] *= 1.01;
  const auto rep = check_optimality(AliceMeasurement(3, blocks), uniform(3));
  EXPECT_TRUE(rep.has(ViolationKind::Completeness));
  EXPECT_FALSE(rep.has(ViolationKind::UnequalNorm));
  EXPECT_FALSE(rep.has(ViolationKind::NonOrthogonal));
}

TEST(CheckOptimality, ProductStateConditionsAreVacuous) {
  SeededRng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_povm(2, 4 + trial % 5, rng);
    EXPECT_TRUE(check_optimality(m, product(2)).pass);
  }
  EXPECT_TRUE(check_optimality(parallel_vectors_measurement(), product(2)).pass);
  EXPECT_TRUE(check_optimality(product_basis_measurement(2), product(2)).pass);
}

TEST(OptimalBobCorrections, QubitPaulis) {
  const auto corr = optimal_bob_corrections(standard_measurement(2), uniform(2));
  ASSERT_TRUE(corr.unitary());
  const Operator expected[4] = {pauli('I'), pauli('Z'), pauli('X'), pauli('X') * pauli('Z')};
  for (int r = 0; r < 4; ++r) {
    // Equal up to a global phase iff |Tr(P^dagger B)| = 2.
    EXPECT_NEAR(std::abs((expected[r].adjoint() * corr.kraus(r)[0]).trace()), 2.0, 1e-12)
        << "r=" << r;
  }
}

TEST(OptimalBobCorrections, ProductStateMapsZeroAlongPhi0) {
  SeededRng rng(5);
  const auto m = random_povm(2, 6, rng);
  const auto corr = optimal_bob_corrections(m, product(2));
  for (int r = 0; r < m.outcomes(); ++r) {
    const CVector out = corr.kraus(r)[0] * CVector::Unit(2, 0);
    const CVector phi0 = m.phi(r, 0).normalized();
    EXPECT_NEAR(std::abs(phi0.dot(out)), 1.0, 1e-10);
  }
}

TEST(OptimalBobCorrections, PolarFactorBeatsRandomSearch) {
  SeededRng rng(6);
  for (int d : {2, 3}) {
    const auto m = random_povm(d, d * d, rng);
    const auto s = SchmidtDecomposition::canonical(oracle::random_lambdas(d, rng));
    const auto corr = optimal_bob_corrections(m, s);
    for (int r = 0; r < 2; ++r) {
      const Operator a = a_operator(m, s.lambdas(), r);
      const double best = std::abs((corr.kraus(r)[0] * a).trace());
      EXPECT_NEAR(best, nuclear_norm(a), 1e-10);
      double random_best = 0.0;
      for (int i = 0; i < 10000; ++i) {
        random_best = std::max(random_best,
                               std::abs((oracle::random_unitary(d, rng) * a).trace()));
      }
      EXPECT_LE(random_best, best + 1e-12);
    }
  }
}

TEST(OptimalBobCorrections, UnitaryForOptimalMeasurements) {
  SeededRng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 3;
    const auto m = oracle::random_optimal_measurement(d, rng);
    const auto s = SchmidtDecomposition::canonical(oracle::random_lambdas(d, rng));
    ASSERT_TRUE(check_optimality(m, s).pass);
    const auto corr = optimal_bob_corrections(m, s);
    for (int r = 0; r < corr.outcomes(); ++r) {
      const Operator& b = corr.kraus(r)[0];
      EXPECT_LE((b.adjoint() * b - Operator::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(OptimalBobCorrections, NullSpaceCompletionIsIrrelevant) {
  const auto s = SchmidtDecomposition::canonical({0.8, 0.6, 0.0});
  const auto meas = standard_measurement(3);
  const auto corr = optimal_bob_corrections(meas, s);
  const Protocol base(s, meas, corr);
  // Rephase the action on |2>, which lies outside the support of every A_r.
  Operator twist = Operator::Identity(3, 3);
  twist(2, 2) = std::polar(1.0, 1.234);
  std::vector<Operator> twisted;
  for (int r = 0; r < corr.outcomes(); ++r) twisted.push_back(corr.kraus(r)[0] * twist);
  const Protocol alt(s, meas, BobCorrections::from_unitaries(3, twisted));
  EXPECT_NEAR(mean_fidelity_exact(base), mean_fidelity_exact(alt), 1e-14);
}

TEST(ProtocolTypes, RejectInvalidParts) {
  EXPECT_THROW(BobCorrections(2, {{Operator::Identity(2, 2) * 1.1}}), std::invalid_argument);
  EXPECT_THROW(BobCorrections(2, {{}}), std::invalid_argument);
  EXPECT_THROW(AliceMeasurement(2, {CMatrix::Identity(3, 3)}), std::invalid_argument);
  std::vector<CMatrix> broken = standard_measurement(2).blocks();
  broken[0] *= 2.0;
  EXPECT_THROW(Protocol(uniform(2), AliceMeasurement(2, broken),
                        optimal_bob_corrections(standard_measurement(2), uniform(2))),
               std::invalid_argument);
  EXPECT_THROW(Protocol(uniform(3), standard_measurement(2),
                        optimal_bob_corrections(standard_measurement(2), uniform(2))),
               std::invalid_argument);
}

TEST(OutcomeDistribution, UniformForMaximalEntanglement) {
  SeededRng rng(8);
  for (int d = 2; d <= 4; ++d) {
    const Protocol proto = standard_protocol(uniform(d));
    for (int i = 0; i < 10; ++i) {
      for (double p : outcome_distribution(proto, sample_haar_state(d, rng))) {
        EXPECT_NEAR(p, 1.0 / (d * d), 1e-12);
      }
    }
  }
}

TEST(OutcomeDistribution, ProductStateQubit) {
  const auto p = outcome_distribution(standard_protocol(product(2)), PureState::basis(2, 0));
  ASSERT_EQ(p.size(), 4u);
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
  EXPECT_NEAR(p[2], 0.0, 1e-15);
  EXPECT_NEAR(p[3], 0.0, 1e-15);
}

TEST(OutcomeDistribution, NormalizedAndNonnegative) {
  SeededRng rng(9);
  for (int i = 0; i < 100; ++i) {
    const int d = 2 + i % 3;
    const auto s = SchmidtDecomposition::canonical(oracle::random_lambdas(d, rng));
    const Protocol proto(s, random_povm(d, d * d + i % 4, rng),
                         BobCorrections::from_unitaries(
                             d, std::vector<Operator>(static_cast<std::size_t>(d * d + i % 4),
                                                      Operator::Identity(d, d))));
    double total = 0.0;
    for (double p : outcome_distribution(proto, sample_haar_state(d, rng))) {
      EXPECT_GE(p, 0.0);
      total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(TeleportOnce, PerfectWithMaximalEntanglement) {
  SeededRng rng(10);
  for (int d = 2; d <= 5; ++d) {
    const Protocol proto = standard_protocol(uniform(d));
    for (int i = 0; i < 50; ++i) {
      const auto psi = sample_haar_state(d, rng);
      const auto out = teleport_once(proto, psi, rng);
      EXPECT_NEAR(overlap_squared(psi, out.output_state), 1.0, 1e-12);
      EXPECT_NEAR(out.probability, 1.0 / (d * d), 1e-12);
    }
  }
}

TEST(TeleportOnce, ProductStateOutputIgnoresInput) {
  SeededRng rng(11);
  const Protocol proto = standard_protocol(product(3));
  for (int i = 0; i < 50; ++i) {
    const auto out = teleport_once(proto, sample_haar_state(3, rng), rng);
    const CVector expected = proto.corrections().kraus(out.outcome)[0] * CVector::Unit(3, 0);
    EXPECT_NEAR(std::abs(expected.dot(out.output_state.amplitudes())), 1.0, 1e-12);
  }
}

TEST(TeleportOnce, AverageFidelityMatchesBound) {
  const std::vector<double> l = {0.9, std::sqrt(0.19)};
  const Protocol proto = standard_protocol(SchmidtDecomposition::canonical(l));
  SeededRng rng(12);
  RunningMean<double> f;
  for (int i = 0; i < 100000; ++i) {
    const auto psi = sample_haar_state(2, rng);
    f.add(overlap_squared(psi, teleport_once(proto, psi, rng).output_state));
  }
  const auto e = f.estimate();
  EXPECT_LE(std::abs(e.value - fidelity_bound(l)), 4 * e.std_error);
}

TEST(TeleportOnce, SamplesKrausBranches) {
  // Mixed corrections: sqrt(t) * optimal unitary, sqrt(1 - t) * identity.
  const auto s = SchmidtDecomposition::canonical({0.8, 0.6});
  const auto meas = standard_measurement(2);
  const auto opt = optimal_bob_corrections(meas, s);
  const double t = 0.7;
  std::vector<std::vector<Operator>> kraus;
  for (int r = 0; r < 4; ++r) {
    kraus.push_back({std::sqrt(t) * opt.kraus(r)[0], std::sqrt(1 - t) * Operator::Identity(2, 2)});
  }
  const Protocol proto(s, meas, BobCorrections(2, kraus));
  EXPECT_FALSE(proto.corrections().unitary());
  SeededRng rng(13);
  RunningMean<double> f;
  int branch1 = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto psi = sample_haar_state(2, rng);
    const auto out = teleport_once(proto, psi, rng);
    branch1 += out.kraus_branch;
    f.add(overlap_squared(psi, out.output_state));
  }
  const auto e = f.estimate();
  EXPECT_LE(std::abs(e.value - mean_fidelity_exact(proto)), 4 * e.std_error);
  EXPECT_NEAR(branch1 / 100000.0, 1 - t, 0.01);
}
