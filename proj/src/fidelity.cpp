#include "qtele/fidelity.hpp"

#include <numeric>
#include <stdexcept>

namespace qtele {

namespace {

double normalization(int d) { return 1.0 / (static_cast<double>(d) * (d + 1)); }

// sum_r sum_k lambda_k^2 ||phi_r^k||^2
double first_term(const AliceMeasurement& meas, std::span<const double> lambdas) {
  double total = 0.0;
  for (const auto& b : meas.blocks()) {
    for (int k = 0; k < meas.dim(); ++k) {
      total += lambdas[k] * lambdas[k] * b.col(k).squaredNorm();
    }
  }
  return total;
}

}  // namespace

double AOperators::total_weight() const {
  double total = 0.0;
  for (const auto& op : a) total += op.squaredNorm();
  return total;
}

AOperators compute_a_operators(const AliceMeasurement& meas,
                               std::span<const double> lambdas) {
  if (static_cast<int>(lambdas.size()) != meas.dim()) {
    throw std::invalid_argument("compute_a_operators: lambda length mismatch");
  }
  AOperators out;
  out.a.reserve(static_cast<std::size_t>(meas.outcomes()));
  for (int r = 0; r < meas.outcomes(); ++r) out.a.push_back(a_operator(meas, lambdas, r));
  return out;
}

double mean_fidelity_exact(const Protocol& proto) {
  const auto& meas = proto.measurement();
  const auto lambdas = proto.schmidt().lambdas();
  const AOperators ops = compute_a_operators(meas, lambdas);
  double second = 0.0;
  for (int r = 0; r < meas.outcomes(); ++r) {
    for (const auto& b : proto.corrections().kraus(r)) {
      second += std::norm((b * ops.a[r]).trace());
    }
  }
  return normalization(proto.dim()) * (first_term(meas, lambdas) + second);
}

double mean_fidelity_from_mkl(const Protocol& proto) {
  const int d = proto.dim();
  const AOperators ops = compute_a_operators(proto.measurement(), proto.schmidt().lambdas());
  std::vector<Operator> mkl;
  mkl.reserve(static_cast<std::size_t>(d * d));
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) mkl.push_back(m_kl_exact(d, k, l));
  }
  Complex total = 0.0;
  for (int r = 0; r < proto.measurement().outcomes(); ++r) {
    for (const auto& b : proto.corrections().kraus(r)) {
      const CMatrix bu = b * ops.a[r];  // column k is B |u_r^k>
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) {
          total += bu.col(k).dot(mkl[static_cast<std::size_t>(k * d + l)] * bu.col(l));
        }
      }
    }
  }
  return total.real();
}

McEstimate<double> mean_fidelity_monte_carlo(const Protocol& proto, std::int64_t n,
                                             SeededRng& rng, int threads) {
  if (n < kMinMcSamples) {
    throw std::invalid_argument("mean_fidelity_monte_carlo: need n >= 1000 samples");
  }
  const int d = proto.dim();
  const AOperators ops = compute_a_operators(proto.measurement(), proto.schmidt().lambdas());
  // B_rs A_r maps psi to the unnormalized corrected branch.
  std::vector<Operator> branches;
  for (int r = 0; r < proto.measurement().outcomes(); ++r) {
    for (const auto& b : proto.corrections().kraus(r)) branches.push_back(b * ops.a[r]);
  }
  const auto acc = accumulate_parallel(
      n, rng, threads, RunningMean<double>{},
      [d, &branches](RunningMean<double>& m, SeededRng& r) {
        const PureState psi = sample_haar_state(d, r);
        const CVector& x = psi.amplitudes();
        double f = 0.0;
        for (const auto& c : branches) f += std::norm(x.dot(c * x));
        m.add(f);
      });
  return acc.estimate();
}

double fidelity_bound(std::span<const double> lambdas) {
  require_normalized_lambdas(lambdas);
  const double s = std::accumulate(lambdas.begin(), lambdas.end(), 0.0);
  return (1.0 + s * s) / (static_cast<double>(lambdas.size()) + 1.0);
}

double optimal_fidelity_given_measurement(const AliceMeasurement& meas,
                                          std::span<const double> lambdas) {
  const int d = meas.dim();
  const AOperators ops = compute_a_operators(meas, lambdas);
  double total = d;
  for (const auto& a : ops.a) {
    const double nn = nuclear_norm(a);
    total += nn * nn;
  }
  return normalization(d) * total;
}

double max_singlet_fraction(std::span<const double> lambdas) {
  require_normalized_lambdas(lambdas);
  const double s = std::accumulate(lambdas.begin(), lambdas.end(), 0.0);
  return s * s / static_cast<double>(lambdas.size());
}

}  // namespace qtele
