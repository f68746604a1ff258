// Haar-random pure states, seeded random streams and the M_kl integrals
//
//   M_kl = \int dpsi <psi|k><l|psi> |psi><psi| = (delta_kl 1 + |k><l|) / (d(d+1))
//
// with the invariant measure normalized to total mass one.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "qtele/qcore.hpp"

namespace qtele {

/// Deterministic random stream identified by (seed, stream).
class SeededRng {
public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Independent child stream, e.g. one per worker thread.
  SeededRng substream(std::uint64_t index) const;

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::mt19937_64& engine() { return engine_; }

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Monte-Carlo mean with standard error = sample std deviation / sqrt(n).
template <typename T>
struct McEstimate {
  T value{};
  double std_error = 0.0;
  std::int64_t n_samples = 0;
};

/// Welford accumulator. For complex samples the variance is E|x - mean|^2.
template <typename T>
class RunningMean {
public:
  void add(const T& x) {
    ++n_;
    const T delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += std::real(std::conj(delta) * (x - mean_));
  }

  /// Parallel combination (Chan et al.).
  void merge(const RunningMean& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
      *this = other;
      return;
    }
    const auto n = n_ + other.n_;
    const T delta = other.mean_ - mean_;
    mean_ += delta * (static_cast<double>(other.n_) / static_cast<double>(n));
    m2_ += other.m2_ + std::norm(delta) * static_cast<double>(n_) *
                           static_cast<double>(other.n_) / static_cast<double>(n);
    n_ = n;
  }

  std::int64_t count() const { return n_; }

  McEstimate<T> estimate() const {
    McEstimate<T> e;
    e.value = mean_;
    e.n_samples = n_;
    if (n_ > 1) {
      const double var = m2_ / static_cast<double>(n_ - 1);
      e.std_error = std::sqrt(var / static_cast<double>(n_));
    }
    return e;
  }

private:
  std::int64_t n_ = 0;
  T mean_{};
  double m2_ = 0.0;
};

/// Draws 2d standard normals as real/imaginary parts and normalizes.
/// Throws std::invalid_argument for d < 2.
PureState sample_haar_state(int d, SeededRng& rng);

/// Runs `n` draws of `step(acc, rng)` split over `threads` workers and
/// merges the per-worker accumulators in worker order. A single worker
/// consumes `rng` itself; several workers use rng.substream(w).
template <typename Acc, typename Step>
Acc accumulate_parallel(std::int64_t n, SeededRng& rng, int threads,
                        const Acc& empty, Step step) {
  if (threads <= 1 || n < threads) {
    Acc acc = empty;
    for (std::int64_t i = 0; i < n; ++i) step(acc, rng);
    return acc;
  }
  std::vector<Acc> partial(static_cast<std::size_t>(threads), empty);
  std::vector<std::thread> pool;
  pool.reserve(partial.size());
  const std::int64_t chunk = n / threads;
  for (int w = 0; w < threads; ++w) {
    const std::int64_t count = chunk + (w == threads - 1 ? n % threads : 0);
    pool.emplace_back([&, w, count] {
      SeededRng local = rng.substream(static_cast<std::uint64_t>(w));
      for (std::int64_t i = 0; i < count; ++i) step(partial[w], local);
    });
  }
  for (auto& t : pool) t.join();
  Acc total = empty;
  for (const auto& p : partial) total.merge(p);
  return total;
}

/// Closed form of the M_kl integral. Throws std::invalid_argument when k or
/// l is outside [0, d).
Operator m_kl_exact(int d, int k, int l);

/// Entrywise Monte-Carlo estimate of M_kl, row-major d x d.
struct MatrixEstimate {
  int dim = 0;
  std::vector<McEstimate<Complex>> entries;

  const McEstimate<Complex>& at(int row, int col) const {
    return entries[static_cast<std::size_t>(row * dim + col)];
  }
};

/// Requires n >= 1000. With threads > 1 the samples are split over
/// substreams of `rng`; output is reproducible for a fixed (seed, threads).
MatrixEstimate m_kl_monte_carlo(int d, int k, int l, std::int64_t n,
                                SeededRng& rng, int threads = 1);

/// Minimum sample count accepted by the Monte-Carlo estimators.
inline constexpr std::int64_t kMinMcSamples = 1000;

}  // namespace qtele
