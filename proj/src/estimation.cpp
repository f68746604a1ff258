#include "qtele/estimation.hpp"

#include <stdexcept>

namespace qtele {

namespace {

void check_strategy(const AliceMeasurement& meas, std::span<const double> lambdas,
                    const EstimationStrategy& strategy) {
  if (static_cast<int>(lambdas.size()) != meas.dim()) {
    throw std::invalid_argument("estimation: lambda length mismatch");
  }
  if (static_cast<int>(strategy.guesses.size()) != meas.outcomes()) {
    throw std::invalid_argument("estimation: one guess per outcome required");
  }
  for (const auto& g : strategy.guesses) {
    if (g.dim() != meas.dim()) throw std::invalid_argument("estimation: guess dimension");
  }
}

}  // namespace

EstimationStrategy optimal_estimates(const AliceMeasurement& meas) {
  EstimationStrategy s;
  s.guesses.reserve(static_cast<std::size_t>(meas.outcomes()));
  for (int r = 0; r < meas.outcomes(); ++r) {
    const CVector phi0 = meas.phi(r, 0);
    if (phi0.norm() <= kRankTolerance) {
      s.flagged.push_back(r);
      s.guesses.push_back(PureState::basis(meas.dim(), 0));
    } else {
      s.guesses.push_back(PureState::normalized(phi0));
    }
  }
  return s;
}

double estimation_fidelity_exact(const AliceMeasurement& meas,
                                 std::span<const double> lambdas,
                                 const EstimationStrategy& strategy) {
  check_strategy(meas, lambdas, strategy);
  const int d = meas.dim();
  double second = 0.0;
  for (int r = 0; r < meas.outcomes(); ++r) {
    const CVector& g = strategy.guesses[r].amplitudes();
    for (int k = 0; k < d; ++k) {
      second += lambdas[k] * lambdas[k] * std::norm(meas.block(r).col(k).dot(g));
    }
  }
  return (d + second) / (static_cast<double>(d) * (d + 1));
}

double estimation_fidelity_bound(std::span<const double> lambdas) {
  require_normalized_lambdas(lambdas);
  for (std::size_t k = 1; k < lambdas.size(); ++k) {
    if (lambdas[k] > lambdas[k - 1]) {
      throw std::invalid_argument("lambdas: must be sorted descending");
    }
  }
  return (1.0 + lambdas[0] * lambdas[0]) / (static_cast<double>(lambdas.size()) + 1.0);
}

McEstimate<double> estimation_fidelity_mc(const AliceMeasurement& meas,
                                          std::span<const double> lambdas,
                                          const EstimationStrategy& strategy,
                                          std::int64_t n, SeededRng& rng, int threads) {
  check_strategy(meas, lambdas, strategy);
  if (n < kMinMcSamples) {
    throw std::invalid_argument("estimation_fidelity_mc: need n >= 1000 samples");
  }
  const int d = meas.dim();
  std::vector<Operator> a;
  for (int r = 0; r < meas.outcomes(); ++r) a.push_back(a_operator(meas, lambdas, r));
  const auto acc = accumulate_parallel(
      n, rng, threads, RunningMean<double>{},
      [&, d](RunningMean<double>& m, SeededRng& rr) {
        const PureState psi = sample_haar_state(d, rr);
        const CVector& x = psi.amplitudes();
        double f = 0.0;
        for (std::size_t r = 0; r < a.size(); ++r) {
          // p_r(psi) = ||A_r psi||^2 = sum_k lambda_k^2 |<phi_r^k|psi>|^2
          f += (a[r] * x).squaredNorm() *
               std::norm(x.dot(strategy.guesses[r].amplitudes()));
        }
        m.add(f);
      });
  return acc.estimate();
}

EstimationComparison compare_to_bound(const AliceMeasurement& meas,
                                      const SchmidtDecomposition& schmidt,
                                      const EstimationStrategy& strategy) {
  EstimationComparison c;
  c.exact = estimation_fidelity_exact(meas, schmidt.lambdas(), strategy);
  c.bound = estimation_fidelity_bound(schmidt.lambdas());
  c.tight_guaranteed = check_optimality(meas, schmidt).pass;
  return c;
}

}  // namespace qtele
