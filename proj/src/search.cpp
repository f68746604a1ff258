#include "qtele/search.hpp"

#include <stdexcept>

#include "qtele/fidelity.hpp"

namespace qtele {

AliceMeasurement random_povm(int d, int outcomes, SeededRng& rng) {
  if (d < 2) throw std::invalid_argument("random_povm: d must be >= 2");
  const int joint = d * d;
  if (outcomes < joint) {
    throw std::invalid_argument("random_povm: R = " + std::to_string(outcomes) +
                                " < d^2 = " + std::to_string(joint) +
                                " cannot resolve the identity on C^d (x) C^d");
  }
  for (;;) {
    CMatrix v(joint, outcomes);
    for (int c = 0; c < outcomes; ++c) {
      for (int i = 0; i < joint; ++i) {
        const double re = rng.normal();
        const double im = rng.normal();
        v(i, c) = Complex(re, im);
      }
    }
    const CMatrix s = v * v.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(s);
    const Eigen::VectorXd& ev = eig.eigenvalues();
    if (eig.info() != Eigen::Success || ev.minCoeff() <= 1e-10 * ev.maxCoeff()) {
      continue;
    }
    const CMatrix inv_sqrt = eig.eigenvectors() *
                             ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                             eig.eigenvectors().adjoint();
    const CMatrix w = inv_sqrt * v;
    std::vector<CMatrix> blocks;
    blocks.reserve(static_cast<std::size_t>(outcomes));
    for (int c = 0; c < outcomes; ++c) {
      // Joint index j d + k <-> |j>_1 |k>_2, so block(j, k) = <j|phi^k>.
      CMatrix block(d, d);
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) block(j, k) = w(j * d + k, c);
      }
      blocks.push_back(std::move(block));
    }
    return AliceMeasurement(d, std::move(blocks));
  }
}

SearchResult search_best_protocol(std::span<const double> lambdas, int outcomes,
                                  std::int64_t iterations, SeededRng& rng) {
  if (iterations < 1) {
    throw std::invalid_argument("search_best_protocol: iterations must be >= 1");
  }
  const int d = static_cast<int>(lambdas.size());
  const double bound = fidelity_bound(lambdas);
  AliceMeasurement standard = standard_measurement(d);
  SearchResult res{optimal_fidelity_given_measurement(standard, lambdas),
                   std::move(standard), 1, bound, 0.0, 0};
  auto score = [&](const double f) {
    if (f > bound + kBoundSlack) ++res.n_violations;
  };
  score(res.best_fidelity);
  for (std::int64_t i = 0; i < iterations; ++i) {
    AliceMeasurement m = random_povm(d, outcomes, rng);
    const double f = optimal_fidelity_given_measurement(m, lambdas);
    score(f);
    ++res.n_evaluated;
    if (f > res.best_fidelity) {
      res.best_fidelity = f;
      res.best_measurement = std::move(m);
    }
  }
  res.gap = bound - res.best_fidelity;
  return res;
}

}  // namespace qtele
