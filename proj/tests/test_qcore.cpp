#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "qtele/haar.hpp"
#include "qtele/qcore.hpp"
#include "support/oracles.hpp"

using namespace qtele;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

BipartiteVector random_bipartite(int d, SeededRng& rng) {
  CMatrix c(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double re = rng.normal();
      const double im = rng.normal();
      c(i, j) = Complex(re, im);
    }
  }
  return BipartiteVector::state(c / c.norm());
}

}  // namespace

TEST(PureState, RejectsBadInput) {
  EXPECT_THROW(PureState(CVector::Ones(1)), std::invalid_argument);
  EXPECT_THROW(PureState(CVector::Ones(2)), std::invalid_argument);
  CVector v(2);
  v << 1.0, 1e-5;
  EXPECT_THROW(PureState{v}, std::invalid_argument);
  EXPECT_THROW(PureState::normalized(CVector::Zero(3)), std::invalid_argument);
  EXPECT_NO_THROW(PureState::normalized(CVector::Ones(3)));
}

TEST(SchmidtDecompose, ProductState) {
  CMatrix c = CMatrix::Zero(2, 2);
  c(0, 0) = 1.0;
  const auto s = schmidt_decompose(BipartiteVector::state(c));
  EXPECT_NEAR(s.lambda(0), 1.0, 1e-12);
  EXPECT_NEAR(s.lambda(1), 0.0, 1e-12);
  EXPECT_EQ(s.effective_rank(), 1);
}

TEST(SchmidtDecompose, MaximallyEntangled) {
  CMatrix c = CMatrix::Zero(2, 2);
  c(0, 0) = kInvSqrt2;
  c(1, 1) = kInvSqrt2;
  const auto s = schmidt_decompose(BipartiteVector::state(c));
  EXPECT_NEAR(s.lambda(0), kInvSqrt2, 1e-12);
  EXPECT_NEAR(s.lambda(1), kInvSqrt2, 1e-12);
  EXPECT_EQ(s.effective_rank(), 2);
}

TEST(SchmidtDecompose, DiagonalIsSorted) {
  CMatrix c = CMatrix::Zero(2, 2);
  c(0, 0) = 0.6;
  c(1, 1) = 0.8;
  const auto s = schmidt_decompose(BipartiteVector::state(c));
  EXPECT_NEAR(s.lambda(0), 0.8, 1e-12);
  EXPECT_NEAR(s.lambda(1), 0.6, 1e-12);
  // Largest coefficient belongs to |1>|1>.
  EXPECT_NEAR(std::abs(s.left_basis()(1, 0)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(s.right_basis()(1, 0)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(s.left_basis()(0, 1)), 1.0, 1e-12);
}

TEST(SchmidtDecompose, Errors) {
  EXPECT_THROW(schmidt_decompose(BipartiteVector::unnormalized(CMatrix::Identity(2, 3) / std::sqrt(2.0))),
               std::invalid_argument);
  EXPECT_THROW(schmidt_decompose(BipartiteVector::unnormalized(CMatrix::Identity(2, 2))),
               std::invalid_argument);
}

TEST(SchmidtDecompose, ReconstructsRandomStates) {
  SeededRng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 2 + trial % 5;
    const auto state = random_bipartite(d, rng);
    const auto s = schmidt_decompose(state);
    double sum2 = 0.0;
    for (int k = 0; k < d; ++k) {
      sum2 += s.lambda(k) * s.lambda(k);
      if (k > 0) EXPECT_GE(s.lambda(k - 1), s.lambda(k));
    }
    EXPECT_NEAR(sum2, 1.0, 1e-12);
    EXPECT_LE((s.reconstruct().coeffs() - state.coeffs()).norm(), 1e-10) << "d=" << d;
  }
}

TEST(SchmidtDecompose, LocalUnitaryInvariance) {
  SeededRng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 5;
    const auto state = random_bipartite(d, rng);
    const CMatrix u = oracle::random_unitary(d, rng);
    const CMatrix v = oracle::random_unitary(d, rng);
    // (U (x) V) acting on c_jk gives U c V^T.
    const auto rotated = BipartiteVector::state(u * state.coeffs() * v.transpose());
    const auto a = schmidt_decompose(state);
    const auto b = schmidt_decompose(rotated);
    for (int k = 0; k < d; ++k) EXPECT_NEAR(a.lambda(k), b.lambda(k), 1e-10);
  }
}

TEST(SchmidtDecomposition, ValidatesInvariants) {
  EXPECT_THROW(SchmidtDecomposition::canonical({0.6, 0.8}), std::invalid_argument);
  EXPECT_THROW(SchmidtDecomposition::canonical({1.0, 0.1}), std::invalid_argument);
  EXPECT_THROW(SchmidtDecomposition::canonical({1.0}), std::invalid_argument);
  EXPECT_EQ(SchmidtDecomposition::canonical({1.0, 0.0, 0.0}).effective_rank(), 1);
  EXPECT_EQ(SchmidtDecomposition::canonical({0.8, 0.6, 0.0}).effective_rank(), 2);
}

TEST(TensorProduct, BasisStates) {
  const auto c = tensor_product(PureState::basis(2, 0), PureState::basis(2, 1)).coeffs();
  EXPECT_EQ(c(0, 1), Complex(1.0));
  EXPECT_EQ(c(0, 0), Complex(0.0));
  EXPECT_EQ(c(1, 0), Complex(0.0));
  EXPECT_EQ(c(1, 1), Complex(0.0));

  CVector plus(2);
  plus << kInvSqrt2, kInvSqrt2;
  const auto p = tensor_product(PureState(plus), PureState::basis(2, 0)).coeffs();
  EXPECT_NEAR(std::abs(p(0, 0) - kInvSqrt2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p(1, 0) - kInvSqrt2), 0.0, 1e-15);
  EXPECT_EQ(p(0, 1), Complex(0.0));
  EXPECT_EQ(p(1, 1), Complex(0.0));
}

TEST(TensorProduct, NormPreserved) {
  SeededRng rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto a = sample_haar_state(3, rng);
    const auto b = sample_haar_state(3, rng);
    EXPECT_NEAR(tensor_product(a, b).squared_norm(), 1.0, 1e-12);
  }
}

TEST(ProjectAlice, MaximallyEntangledBellOutcome) {
  // Phi_0 = (|00> + |11>)/sqrt(2) unnormalized, tele maximally entangled, psi = |0>.
  const auto phi = BipartiteVector::unnormalized(CMatrix::Identity(2, 2) * kInvSqrt2);
  const auto tele = BipartiteVector::state(CMatrix::Identity(2, 2) * kInvSqrt2);
  const auto b = project_alice(phi, PureState::basis(2, 0), tele);
  EXPECT_NEAR(b.weight, 0.25, 1e-15);
  EXPECT_NEAR(std::abs(b.vector[0]), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(b.vector[1]), 0.0, 1e-15);
}

TEST(ProjectAlice, ProductSharedStateLeavesBobInZero) {
  CMatrix t = CMatrix::Zero(2, 2);
  t(0, 0) = 1.0;
  const auto tele = BipartiteVector::state(t);
  SeededRng rng(3);
  const auto psi = sample_haar_state(2, rng);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix phi(2, 2);
    for (int i = 0; i < 4; ++i) phi(i / 2, i % 2) = Complex(rng.normal(), rng.normal());
    const auto b = project_alice(BipartiteVector::unnormalized(phi), psi, tele);
    EXPECT_NEAR(std::abs(b.vector[1]), 0.0, 1e-15);
  }
}

TEST(ProjectAlice, WeightsSumToOneForCompleteBasis) {
  // Any orthonormal basis of C^d (x) C^d is a complete rank-one measurement.
  SeededRng rng(8);
  for (int d : {2, 3, 4}) {
    const CMatrix basis = oracle::random_unitary(d * d, rng);
    const auto tele = random_bipartite(d, rng);
    for (int trial = 0; trial < 100; ++trial) {
      const auto psi = sample_haar_state(d, rng);
      double total = 0.0;
      for (int r = 0; r < d * d; ++r) {
        CMatrix phi(d, d);
        for (int j = 0; j < d; ++j)
          for (int k = 0; k < d; ++k) phi(j, k) = basis(j * d + k, r);
        total += project_alice(BipartiteVector::unnormalized(phi), psi, tele).weight;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(ProjectAlice, DimensionMismatch) {
  const auto tele = BipartiteVector::state(CMatrix::Identity(3, 3) / std::sqrt(3.0));
  const auto phi = BipartiteVector::unnormalized(CMatrix::Identity(2, 2));
  EXPECT_THROW(project_alice(phi, PureState::basis(2, 0), tele), std::invalid_argument);
}

TEST(NuclearNorm, Examples) {
  EXPECT_NEAR(nuclear_norm(Operator::Identity(3, 3)), 3.0, 1e-14);
  Operator diag = Operator::Zero(2, 2);
  diag(0, 0) = 0.8;
  diag(1, 1) = 0.6;
  EXPECT_NEAR(nuclear_norm(diag), 1.4, 1e-14);
  SeededRng rng(2);
  EXPECT_NEAR(nuclear_norm(oracle::random_unitary(4, rng)), 4.0, 1e-10);
}

TEST(NuclearNorm, UnitaryInvariance) {
  SeededRng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 4;
    CMatrix a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
    const CMatrix u = oracle::random_unitary(d, rng);
    EXPECT_NEAR(nuclear_norm(u * a), nuclear_norm(a), 1e-10);
  }
}
