// Teleportation protocols: Alice's rank-one POVM written in the Schmidt
// basis of the shared state, Bob's per-outcome corrections, and single-shot
// simulation.
//
// Alice's outcome r is the vector |Phi_r> = sum_k |phi_r^k> (x) |k>. Bob's
// unnormalized state after outcome r is b_r = A_r |psi>, where
// A_r = sum_k lambda_k |k><phi_r^k|. All single-particle vectors are written
// in the Schmidt coordinates of the shared state.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qtele/haar.hpp"
#include "qtele/qcore.hpp"

namespace qtele {

/// R outcomes, each a d x d block whose column k is |phi_r^k>.
///
/// Construction checks shapes only; completeness is a separate check so that
/// deliberately broken measurements can be represented and reported.
class AliceMeasurement {
public:
  AliceMeasurement(int dim, std::vector<CMatrix> blocks);

  int dim() const { return dim_; }
  int outcomes() const { return static_cast<int>(blocks_.size()); }
  const CMatrix& block(int r) const { return blocks_[r]; }
  CVector phi(int r, int k) const { return blocks_[r].col(k); }
  const std::vector<CMatrix>& blocks() const { return blocks_; }

  /// |Phi_r> as a coefficient matrix over particles 1 and 2.
  BipartiteVector joint_vector(int r) const;

private:
  int dim_;
  std::vector<CMatrix> blocks_;
};

/// Kraus operators B_rs for every outcome r.
class BobCorrections {
public:
  /// Throws std::invalid_argument unless every list is nonempty, square of
  /// size `dim`, and sum_s B_rs^dagger B_rs = 1 within kEqualityTolerance.
  BobCorrections(int dim, std::vector<std::vector<Operator>> kraus);

  static BobCorrections from_unitaries(int dim, std::vector<Operator> unitaries);

  int dim() const { return dim_; }
  int outcomes() const { return static_cast<int>(kraus_.size()); }
  const std::vector<Operator>& kraus(int r) const { return kraus_[r]; }
  const std::vector<std::vector<Operator>>& all() const { return kraus_; }
  /// True when each outcome has a single (necessarily unitary) operator.
  bool unitary() const { return unitary_; }

private:
  int dim_;
  std::vector<std::vector<Operator>> kraus_;
  bool unitary_ = true;
};

class Protocol {
public:
  /// Throws std::invalid_argument on any dimension / outcome-count mismatch
  /// or when the measurement is incomplete at kEqualityTolerance.
  Protocol(SchmidtDecomposition schmidt, AliceMeasurement measurement,
           BobCorrections corrections);

  int dim() const { return schmidt_.dim(); }
  const SchmidtDecomposition& schmidt() const { return schmidt_; }
  const AliceMeasurement& measurement() const { return measurement_; }
  const BobCorrections& corrections() const { return corrections_; }

private:
  SchmidtDecomposition schmidt_;
  AliceMeasurement measurement_;
  BobCorrections corrections_;
};

struct TeleportOutcome {
  int outcome = 0;
  int kraus_branch = 0;
  double probability = 0.0;
  PureState output_state;
};

/// Generalized Bell measurement with R = d^2 outcomes r = p + q d and
/// phi_r^k = e^{2 pi i k p / d} |(k + q) mod d> / sqrt(d).
AliceMeasurement standard_measurement(int d);

/// Standard measurement plus the optimal corrections for `schmidt`.
Protocol standard_protocol(const SchmidtDecomposition& schmidt);

struct CompletenessReport {
  bool pass = false;
  double max_error = 0.0;
  int worst_k = 0;
  int worst_l = 0;
};

/// Entrywise check of sum_r |phi_r^k><phi_r^l| = delta_kl 1.
CompletenessReport validate_completeness(const AliceMeasurement& meas,
                                         double tol = kEqualityTolerance);

enum class ViolationKind { Completeness, UnequalNorm, NonOrthogonal };

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  int outcome = -1;  // -1 for completeness
  int k = 0;
  int l = 0;
  double error = 0.0;
};

struct OptimalityReport {
  bool pass = false;
  CompletenessReport completeness;
  std::vector<Violation> violations;

  bool has(ViolationKind kind) const;
};

/// For each outcome and k, l <= m: <phi_r^k|phi_r^l> = delta_kl ||phi_r^0||^2.
/// Completeness failures are reported as ViolationKind::Completeness.
OptimalityReport check_optimality(const AliceMeasurement& meas,
                                  const SchmidtDecomposition& schmidt,
                                  double tol = kEqualityTolerance);

/// A_r = sum_k lambda_k |k><phi_r^k| for outcome r.
Operator a_operator(const AliceMeasurement& meas, std::span<const double> lambdas,
                    int r);

/// Polar-factor unitary maximizing |Tr(B A_r)| per outcome: with
/// A_r = V S W^dagger, B_r = W V^dagger.
BobCorrections optimal_bob_corrections(const AliceMeasurement& meas,
                                       const SchmidtDecomposition& schmidt);

/// Outcome probabilities ||A_r psi||^2.
std::vector<double> outcome_distribution(const Protocol& proto, const PureState& psi);

/// Samples an outcome and a Kraus branch and returns the normalized output.
/// Throws std::logic_error when every outcome has zero probability.
TeleportOutcome teleport_once(const Protocol& proto, const PureState& psi,
                              SeededRng& rng);

}  // namespace qtele
