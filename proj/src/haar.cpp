#include "qtele/haar.hpp"

#include <stdexcept>
#include <string>

namespace qtele {

namespace {

// splitmix64 finalizer, used to derive child stream ids.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

void check_index(int d, int i, const char* what) {
  if (i < 0 || i >= d) {
    throw std::invalid_argument(std::string(what) + ": index out of range");
  }
}

struct MatrixAccumulator {
  std::vector<RunningMean<Complex>> cells;

  void merge(const MatrixAccumulator& other) {
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i].merge(other.cells[i]);
  }
};

}  // namespace

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

SeededRng SeededRng::substream(std::uint64_t index) const {
  return SeededRng(seed_, mix64(stream_ ^ mix64(index + 1)));
}

PureState sample_haar_state(int d, SeededRng& rng) {
  if (d < 2) {
    throw std::invalid_argument("sample_haar_state: d must be >= 2");
  }
  CVector v(d);
  for (int i = 0; i < d; ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    v[i] = Complex(re, im);
  }
  return PureState::normalized(v);
}

Operator m_kl_exact(int d, int k, int l) {
  if (d < 2) throw std::invalid_argument("m_kl_exact: d must be >= 2");
  check_index(d, k, "m_kl_exact");
  check_index(d, l, "m_kl_exact");
  Operator m = Operator::Zero(d, d);
  if (k == l) m += Operator::Identity(d, d);
  m(k, l) += 1.0;
  return m / static_cast<double>(d * (d + 1));
}

MatrixEstimate m_kl_monte_carlo(int d, int k, int l, std::int64_t n,
                                SeededRng& rng, int threads) {
  if (d < 2) throw std::invalid_argument("m_kl_monte_carlo: d must be >= 2");
  check_index(d, k, "m_kl_monte_carlo");
  check_index(d, l, "m_kl_monte_carlo");
  if (n < kMinMcSamples) {
    throw std::invalid_argument("m_kl_monte_carlo: need n >= 1000 samples");
  }
  MatrixAccumulator empty{std::vector<RunningMean<Complex>>(
      static_cast<std::size_t>(d * d))};
  const auto acc = accumulate_parallel(
      n, rng, threads, empty, [d, k, l](MatrixAccumulator& a, SeededRng& r) {
        const PureState psi = sample_haar_state(d, r);
        const CVector& x = psi.amplitudes();
        // <psi|k><l|psi> |psi><psi|
        const Complex weight = std::conj(x[k]) * x[l];
        for (int i = 0; i < d; ++i) {
          for (int j = 0; j < d; ++j) {
            a.cells[static_cast<std::size_t>(i * d + j)].add(
                weight * x[i] * std::conj(x[j]));
          }
        }
      });
  MatrixEstimate out;
  out.dim = d;
  out.entries.reserve(acc.cells.size());
  for (const auto& c : acc.cells) out.entries.push_back(c.estimate());
  return out;
}

}  // namespace qtele
