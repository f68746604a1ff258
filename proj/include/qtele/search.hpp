// Random search over Alice's measurements, scored with the optimal unitary
// corrections. Used to confirm numerically that no measurement beats the
// closed-form fidelity bound.
#pragma once

#include <cstdint>
#include <span>

#include "qtele/haar.hpp"
#include "qtele/protocol.hpp"

namespace qtele {

struct SearchResult {
  double best_fidelity = 0.0;
  AliceMeasurement best_measurement;
  std::int64_t n_evaluated = 0;
  double bound = 0.0;
  double gap = 0.0;  // bound - best_fidelity
  /// Measurements scoring above bound + 1e-9. Zero if the bound holds.
  std::int64_t n_violations = 0;
};

/// Random rank-one POVM with R outcomes: Gaussian vectors V_r in C^d (x) C^d
/// whitened as S^{-1/2} V_r, S = sum_r V_r V_r^dagger.
///
/// A rank-one POVM on the d^2-dimensional joint space needs R >= d^2; smaller
/// R throws std::invalid_argument. A numerically singular S is redrawn.
AliceMeasurement random_povm(int d, int outcomes, SeededRng& rng);

/// Scores the standard measurement plus `iterations` random POVMs.
SearchResult search_best_protocol(std::span<const double> lambdas, int outcomes,
                                  std::int64_t iterations, SeededRng& rng);

inline constexpr double kBoundSlack = 1e-9;

}  // namespace qtele
