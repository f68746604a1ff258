// Mean teleportation fidelity: exact, Monte-Carlo, and the optimum.
//
// With A_r = sum_k lambda_k |k><phi_r^k| the average over Haar inputs
// reduces to
//
//   f = 1/(d(d+1)) sum_r [ sum_k lambda_k^2 ||phi_r^k||^2 + sum_s |Tr(B_rs A_r)|^2 ]
//
// and over all protocols f <= [1 + (sum_k lambda_k)^2] / (d+1).
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qtele/haar.hpp"
#include "qtele/protocol.hpp"

namespace qtele {

/// One A_r per outcome. Column k of A_r is |u_r^k>.
struct AOperators {
  std::vector<Operator> a;

  /// sum_r Tr(A_r^dagger A_r); equals d for a complete measurement.
  double total_weight() const;
};

/// Throws std::invalid_argument on lambda length mismatch.
AOperators compute_a_operators(const AliceMeasurement& meas,
                               std::span<const double> lambdas);

double mean_fidelity_exact(const Protocol& proto);

/// The same quantity assembled from the M_kl sandwich
/// sum_rs sum_kl <u_r^k| B^dagger M_kl B |u_r^l>. O(R d^5); used as a
/// cross-check of mean_fidelity_exact.
double mean_fidelity_from_mkl(const Protocol& proto);

/// Averages the conditional fidelity sum_rs |<psi|B_rs A_r|psi>|^2 over Haar
/// inputs. Requires n >= 1000.
McEstimate<double> mean_fidelity_monte_carlo(const Protocol& proto, std::int64_t n,
                                             SeededRng& rng, int threads = 1);

/// [1 + (sum lambda)^2] / (d+1). Throws on unnormalized lambda.
double fidelity_bound(std::span<const double> lambdas);

/// Best fidelity with this measurement and unitary corrections:
/// (d + sum_r ||A_r||_*^2) / (d(d+1)).
double optimal_fidelity_given_measurement(const AliceMeasurement& meas,
                                          std::span<const double> lambdas);

/// (sum lambda)^2 / d, the inverse of f = (F d + 1)/(d + 1) at the bound.
double max_singlet_fraction(std::span<const double> lambdas);

}  // namespace qtele
