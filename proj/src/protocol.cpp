#include "qtele/protocol.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qtele {

AliceMeasurement::AliceMeasurement(int dim, std::vector<CMatrix> blocks)
    : dim_(dim), blocks_(std::move(blocks)) {
  if (dim_ < 2) {
    throw std::invalid_argument("AliceMeasurement: dimension must be >= 2");
  }
  if (blocks_.empty()) {
    throw std::invalid_argument("AliceMeasurement: need at least one outcome");
  }
  for (const auto& b : blocks_) {
    if (b.rows() != dim_ || b.cols() != dim_) {
      throw std::invalid_argument("AliceMeasurement: block shape mismatch");
    }
  }
}

BipartiteVector AliceMeasurement::joint_vector(int r) const {
  // Phi_r = sum_k phi_r^k (x) |k>, so coefficient (j, k) is <j|phi_r^k>.
  return BipartiteVector::unnormalized(blocks_[r]);
}

BobCorrections::BobCorrections(int dim, std::vector<std::vector<Operator>> kraus)
    : dim_(dim), kraus_(std::move(kraus)) {
  for (std::size_t r = 0; r < kraus_.size(); ++r) {
    const auto& ops = kraus_[r];
    if (ops.empty()) {
      throw std::invalid_argument("BobCorrections: outcome " + std::to_string(r) +
                                  " has no Kraus operators");
    }
    Operator total = Operator::Zero(dim_, dim_);
    for (const auto& b : ops) {
      if (b.rows() != dim_ || b.cols() != dim_) {
        throw std::invalid_argument("BobCorrections: operator shape mismatch");
      }
      total += b.adjoint() * b;
    }
    const double err =
        (total - Operator::Identity(dim_, dim_)).cwiseAbs().maxCoeff();
    if (err > kEqualityTolerance) {
      throw std::invalid_argument("BobCorrections: outcome " + std::to_string(r) +
                                  " violates sum_s B^dagger B = 1 (error " +
                                  std::to_string(err) + ")");
    }
    if (ops.size() != 1) unitary_ = false;
  }
}

BobCorrections BobCorrections::from_unitaries(int dim,
                                              std::vector<Operator> unitaries) {
  std::vector<std::vector<Operator>> kraus;
  kraus.reserve(unitaries.size());
  for (auto& u : unitaries) kraus.push_back({std::move(u)});
  return BobCorrections(dim, std::move(kraus));
}

Protocol::Protocol(SchmidtDecomposition schmidt, AliceMeasurement measurement,
                   BobCorrections corrections)
    : schmidt_(std::move(schmidt)),
      measurement_(std::move(measurement)),
      corrections_(std::move(corrections)) {
  if (measurement_.dim() != schmidt_.dim() || corrections_.dim() != schmidt_.dim()) {
    throw std::invalid_argument("Protocol: dimension mismatch");
  }
  if (corrections_.outcomes() != measurement_.outcomes()) {
    throw std::invalid_argument("Protocol: corrections/outcome count mismatch");
  }
  const auto report = validate_completeness(measurement_);
  if (!report.pass) {
    throw std::invalid_argument("Protocol: measurement is not complete (error " +
                                std::to_string(report.max_error) + ")");
  }
}

AliceMeasurement standard_measurement(int d) {
  if (d < 2) throw std::invalid_argument("standard_measurement: d must be >= 2");
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<CMatrix> blocks(static_cast<std::size_t>(d * d), CMatrix::Zero(d, d));
  // r = p + q d: p runs fastest.
  for (int q = 0; q < d; ++q) {
    for (int p = 0; p < d; ++p) {
      CMatrix& b = blocks[static_cast<std::size_t>(p + q * d)];
      for (int k = 0; k < d; ++k) {
        const double angle =
            2.0 * std::numbers::pi * static_cast<double>((k * p) % d) / d;
        b((k + q) % d, k) = scale * std::polar(1.0, angle);
      }
    }
  }
  return AliceMeasurement(d, std::move(blocks));
}

Protocol standard_protocol(const SchmidtDecomposition& schmidt) {
  AliceMeasurement meas = standard_measurement(schmidt.dim());
  BobCorrections corrections = optimal_bob_corrections(meas, schmidt);
  return Protocol(schmidt, std::move(meas), std::move(corrections));
}

CompletenessReport validate_completeness(const AliceMeasurement& meas, double tol) {
  const int d = meas.dim();
  CompletenessReport rep;
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      CMatrix sum = CMatrix::Zero(d, d);
      for (const auto& b : meas.blocks()) sum += b.col(k) * b.col(l).adjoint();
      if (k == l) sum -= CMatrix::Identity(d, d);
      const double err = sum.cwiseAbs().maxCoeff();
      if (err > rep.max_error) {
        rep.max_error = err;
        rep.worst_k = k;
        rep.worst_l = l;
      }
    }
  }
  rep.pass = rep.max_error <= tol;
  return rep;
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Completeness:
      return "completeness";
    case ViolationKind::UnequalNorm:
      return "unequal_norm";
    case ViolationKind::NonOrthogonal:
      return "non_orthogonal";
  }
  return "unknown";
}

bool OptimalityReport::has(ViolationKind kind) const {
  for (const auto& v : violations) {
    if (v.kind == kind) return true;
  }
  return false;
}

OptimalityReport check_optimality(const AliceMeasurement& meas,
                                  const SchmidtDecomposition& schmidt, double tol) {
  if (meas.dim() != schmidt.dim()) {
    throw std::invalid_argument("check_optimality: dimension mismatch");
  }
  OptimalityReport rep;
  rep.completeness = validate_completeness(meas, tol);
  if (!rep.completeness.pass) {
    rep.violations.push_back({ViolationKind::Completeness, -1,
                              rep.completeness.worst_k, rep.completeness.worst_l,
                              rep.completeness.max_error});
  }
  const int m1 = schmidt.effective_rank();
  for (int r = 0; r < meas.outcomes(); ++r) {
    const CMatrix& b = meas.block(r);
    const CMatrix gram = b.leftCols(m1).adjoint() * b.leftCols(m1);
    const double ref = gram(0, 0).real();
    for (int k = 0; k < m1; ++k) {
      for (int l = k; l < m1; ++l) {
        const double err = std::abs(gram(k, l) - (k == l ? ref : 0.0));
        if (err > tol) {
          rep.violations.push_back({k == l ? ViolationKind::UnequalNorm
                                           : ViolationKind::NonOrthogonal,
                                    r, k, l, err});
        }
      }
    }
  }
  rep.pass = rep.violations.empty();
  return rep;
}

Operator a_operator(const AliceMeasurement& meas, std::span<const double> lambdas,
                    int r) {
  const int d = meas.dim();
  if (static_cast<int>(lambdas.size()) != d) {
    throw std::invalid_argument("a_operator: lambda length mismatch");
  }
  // Row k is lambda_k <phi_r^k|.
  Operator a = meas.block(r).adjoint();
  for (int k = 0; k < d; ++k) a.row(k) *= lambdas[k];
  return a;
}

BobCorrections optimal_bob_corrections(const AliceMeasurement& meas,
                                       const SchmidtDecomposition& schmidt) {
  const int d = meas.dim();
  if (schmidt.dim() != d) {
    throw std::invalid_argument("optimal_bob_corrections: dimension mismatch");
  }
  std::vector<Operator> unitaries;
  unitaries.reserve(static_cast<std::size_t>(meas.outcomes()));
  for (int r = 0; r < meas.outcomes(); ++r) {
    const Operator a = a_operator(meas, schmidt.lambdas(), r);
    // Full U and V complete the polar factor on the kernel of A_r; any
    // completion gives the same fidelity.
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    unitaries.push_back(svd.matrixV() * svd.matrixU().adjoint());
  }
  return BobCorrections::from_unitaries(d, std::move(unitaries));
}

std::vector<double> outcome_distribution(const Protocol& proto, const PureState& psi) {
  if (psi.dim() != proto.dim()) {
    throw std::invalid_argument("outcome_distribution: dimension mismatch");
  }
  const auto& meas = proto.measurement();
  std::vector<double> probs(static_cast<std::size_t>(meas.outcomes()));
  for (int r = 0; r < meas.outcomes(); ++r) {
    probs[r] = (a_operator(meas, proto.schmidt().lambdas(), r) * psi.amplitudes())
                   .squaredNorm();
  }
  return probs;
}

TeleportOutcome teleport_once(const Protocol& proto, const PureState& psi,
                              SeededRng& rng) {
  if (psi.dim() != proto.dim()) {
    throw std::invalid_argument("teleport_once: dimension mismatch");
  }
  const auto& meas = proto.measurement();
  std::vector<CVector> bob;
  std::vector<double> weights;
  bob.reserve(static_cast<std::size_t>(meas.outcomes()));
  for (int r = 0; r < meas.outcomes(); ++r) {
    bob.push_back(a_operator(meas, proto.schmidt().lambdas(), r) * psi.amplitudes());
    weights.push_back(bob.back().squaredNorm());
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) {
    throw std::logic_error("teleport_once: all outcome probabilities are zero");
  }
  std::discrete_distribution<int> pick_r(weights.begin(), weights.end());
  const int r = pick_r(rng.engine());

  const auto& kraus = proto.corrections().kraus(r);
  std::vector<CVector> branches;
  std::vector<double> branch_weights;
  for (const auto& b : kraus) {
    branches.push_back(b * bob[r]);
    branch_weights.push_back(branches.back().squaredNorm());
  }
  int s = 0;
  if (kraus.size() > 1) {
    std::discrete_distribution<int> pick_s(branch_weights.begin(),
                                           branch_weights.end());
    s = pick_s(rng.engine());
  }
  return TeleportOutcome{r, s, weights[r] / total,
                         PureState::normalized(branches[s])};
}

}  // namespace qtele
