// Alice's outcome-conditioned guess of the teleported state.
//
// Outcome r occurs with probability sum_k lambda_k^2 |<phi_r^k|psi>|^2 and
// Alice announces |guess_r>. The mean overlap is bounded by
// (1 + lambda_0^2)/(d+1), reached by guess_r = phi_r^0 / ||phi_r^0||.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qtele/haar.hpp"
#include "qtele/protocol.hpp"

namespace qtele {

/// One normalized guess per outcome. Only U_r|0> of a guessing unitary
/// ever matters, so the image vector is stored directly.
struct EstimationStrategy {
  std::vector<PureState> guesses;
  /// Outcomes whose phi_r^0 vanished; their guess is an arbitrary |0>.
  std::vector<int> flagged;
};

EstimationStrategy optimal_estimates(const AliceMeasurement& meas);

/// (d + sum_k lambda_k^2 sum_r |<phi_r^k|guess_r>|^2) / (d(d+1))
double estimation_fidelity_exact(const AliceMeasurement& meas,
                                 std::span<const double> lambdas,
                                 const EstimationStrategy& strategy);

/// (1 + lambda_0^2)/(d+1). Requires normalized, descending lambda.
double estimation_fidelity_bound(std::span<const double> lambdas);

/// Haar average of sum_r p_r(psi) |<psi|guess_r>|^2. Requires n >= 1000.
McEstimate<double> estimation_fidelity_mc(const AliceMeasurement& meas,
                                          std::span<const double> lambdas,
                                          const EstimationStrategy& strategy,
                                          std::int64_t n, SeededRng& rng,
                                          int threads = 1);

struct EstimationComparison {
  double exact = 0.0;
  double bound = 0.0;
  // The bound is only known to be attainable for measurements passing
  // check_optimality.
  bool tight_guaranteed = false;
};

EstimationComparison compare_to_bound(const AliceMeasurement& meas,
                                      const SchmidtDecomposition& schmidt,
                                      const EstimationStrategy& strategy);

}  // namespace qtele
