// Complex linear algebra for pure states of one and two qudits.
//
// Everything is dense and double precision. States are held as Eigen
// vectors, bipartite states as coefficient matrices c_{jk} meaning
// sum_{jk} c_{jk} |j> (x) |k>.
#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qtele {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// A square complex matrix acting on a single qudit (unitaries, Kraus
/// operators, M_kl integrals). No normalization is implied.
using Operator = CMatrix;

// Construction-time normalization tolerance.
inline constexpr double kNormTolerance = 1e-12;
// Reconstruction / equality tolerance.
inline constexpr double kEqualityTolerance = 1e-10;
// Schmidt coefficients at or below this count as zero.
inline constexpr double kRankTolerance = 1e-12;

/// Unit vector of d >= 2 complex amplitudes.
class PureState {
public:
  /// Throws std::invalid_argument if dim < 2 or the norm differs from 1 by
  /// more than kNormTolerance.
  explicit PureState(CVector amplitudes);

  /// Rescales `v` to unit norm. Throws on a zero vector or dim < 2.
  static PureState normalized(const CVector& v);
  static PureState basis(int dim, int k);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const CVector& amplitudes() const { return amplitudes_; }
  Complex operator[](int i) const { return amplitudes_[i]; }

private:
  CVector amplitudes_;
};

/// |<a|b>|^2
double overlap_squared(const PureState& a, const PureState& b);

/// Coefficient matrix of a vector in C^{dA} (x) C^{dB}.
///
/// Physical states are unit norm. Measurement vectors |Phi_r> are in
/// general unnormalized and are built with `unnormalized`.
class BipartiteVector {
public:
  /// Throws std::invalid_argument unless sum |c_jk|^2 = 1 within kNormTolerance.
  static BipartiteVector state(CMatrix coeffs);
  static BipartiteVector unnormalized(CMatrix coeffs);

  int dim_a() const { return static_cast<int>(coeffs_.rows()); }
  int dim_b() const { return static_cast<int>(coeffs_.cols()); }
  const CMatrix& coeffs() const { return coeffs_; }
  bool normalized() const { return normalized_; }
  double squared_norm() const { return coeffs_.squaredNorm(); }

private:
  BipartiteVector(CMatrix coeffs, bool normalized)
      : coeffs_(std::move(coeffs)), normalized_(normalized) {}

  CMatrix coeffs_;
  bool normalized_;
};

/// sum_k lambda_k |left_k> (x) |right_k>, lambda sorted descending.
///
/// Bases are stored column-wise. A decomposition built from coefficients
/// alone uses the computational basis on both sides.
class SchmidtDecomposition {
public:
  /// Validates shape, ordering, nonnegativity, sum lambda^2 = 1 and
  /// orthonormality of both bases.
  SchmidtDecomposition(std::vector<double> lambdas, CMatrix left_basis,
                       CMatrix right_basis);

  /// lambda with computational bases. Same validation as the constructor.
  static SchmidtDecomposition canonical(std::vector<double> lambdas);

  int dim() const { return static_cast<int>(lambdas_.size()); }
  std::span<const double> lambdas() const { return lambdas_; }
  double lambda(int k) const { return lambdas_[k]; }
  const CMatrix& left_basis() const { return left_; }
  const CMatrix& right_basis() const { return right_; }
  /// Number of lambda_k > kRankTolerance, i.e. m + 1.
  int effective_rank() const { return rank_; }

  BipartiteVector reconstruct() const;

private:
  std::vector<double> lambdas_;
  CMatrix left_;
  CMatrix right_;
  int rank_ = 0;
};

/// Throws std::invalid_argument if d_A != d_B or the state is not unit norm.
SchmidtDecomposition schmidt_decompose(const BipartiteVector& state);

/// c_jk = a_j b_k
BipartiteVector tensor_product(const PureState& a, const PureState& b);

/// Bob's unnormalized conditional state <Phi|_{12} (|psi>_1 (x) |tele>_{23})
/// together with its squared norm (the outcome weight).
struct ProjectedState {
  CVector vector;
  double weight = 0.0;
};

/// General contraction: b_m = sum_{jk} conj(Phi_jk) psi_j tele_km.
/// Throws std::invalid_argument on any dimension mismatch.
ProjectedState project_alice(const BipartiteVector& phi, const PureState& psi,
                             const BipartiteVector& tele);

/// Sum of singular values.
double nuclear_norm(const Operator& a);

/// Throws std::invalid_argument unless lambda is nonnegative with
/// sum lambda^2 = 1 within `tol`.
void require_normalized_lambdas(std::span<const double> lambdas,
                                double tol = 1e-9);

}  // namespace qtele
