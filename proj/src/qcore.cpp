#include "qtele/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qtele {

namespace {

bool is_orthonormal(const CMatrix& basis) {
  const CMatrix gram = basis.adjoint() * basis;
  return (gram - CMatrix::Identity(basis.cols(), basis.cols()))
             .cwiseAbs()
             .maxCoeff() <= kEqualityTolerance;
}

}  // namespace

PureState::PureState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 2) {
    throw std::invalid_argument("PureState: dimension must be >= 2");
  }
  const double n2 = amplitudes_.squaredNorm();
  if (std::abs(n2 - 1.0) > kNormTolerance) {
    throw std::invalid_argument("PureState: squared norm " + std::to_string(n2) +
                                " is not 1");
  }
}

PureState PureState::normalized(const CVector& v) {
  const double n = v.norm();
  if (n == 0.0) {
    throw std::invalid_argument("PureState: cannot normalize the zero vector");
  }
  return PureState(v / n);
}

PureState PureState::basis(int dim, int k) {
  if (k < 0 || k >= dim) {
    throw std::invalid_argument("PureState::basis: index out of range");
  }
  CVector v = CVector::Zero(dim);
  v[k] = 1.0;
  return PureState(std::move(v));
}

double overlap_squared(const PureState& a, const PureState& b) {
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

BipartiteVector BipartiteVector::state(CMatrix coeffs) {
  const double n2 = coeffs.squaredNorm();
  if (std::abs(n2 - 1.0) > kNormTolerance) {
    throw std::invalid_argument("BipartiteVector: squared norm " +
                                std::to_string(n2) + " is not 1");
  }
  return BipartiteVector(std::move(coeffs), true);
}

BipartiteVector BipartiteVector::unnormalized(CMatrix coeffs) {
  return BipartiteVector(std::move(coeffs), false);
}

SchmidtDecomposition::SchmidtDecomposition(std::vector<double> lambdas,
                                           CMatrix left_basis,
                                           CMatrix right_basis)
    : lambdas_(std::move(lambdas)),
      left_(std::move(left_basis)),
      right_(std::move(right_basis)) {
  const auto d = static_cast<Eigen::Index>(lambdas_.size());
  if (d < 2) {
    throw std::invalid_argument("SchmidtDecomposition: dimension must be >= 2");
  }
  if (left_.rows() != d || left_.cols() != d || right_.rows() != d ||
      right_.cols() != d) {
    throw std::invalid_argument("SchmidtDecomposition: basis shape mismatch");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < lambdas_.size(); ++k) {
    if (lambdas_[k] < 0.0) {
      throw std::invalid_argument(
          "SchmidtDecomposition: coefficients must be nonnegative");
    }
    if (k > 0 && lambdas_[k] > lambdas_[k - 1]) {
      throw std::invalid_argument(
          "SchmidtDecomposition: coefficients must be sorted descending");
    }
    total += lambdas_[k] * lambdas_[k];
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw std::invalid_argument(
        "SchmidtDecomposition: sum of squared coefficients is not 1");
  }
  if (!is_orthonormal(left_) || !is_orthonormal(right_)) {
    throw std::invalid_argument("SchmidtDecomposition: bases not orthonormal");
  }
  rank_ = static_cast<int>(std::count_if(lambdas_.begin(), lambdas_.end(),
                                         [](double l) { return l > kRankTolerance; }));
}

SchmidtDecomposition SchmidtDecomposition::canonical(std::vector<double> lambdas) {
  const auto d = static_cast<Eigen::Index>(lambdas.size());
  return SchmidtDecomposition(std::move(lambdas), CMatrix::Identity(d, d),
                              CMatrix::Identity(d, d));
}

BipartiteVector SchmidtDecomposition::reconstruct() const {
  CMatrix c = CMatrix::Zero(dim(), dim());
  for (int k = 0; k < dim(); ++k) {
    c += lambdas_[k] * left_.col(k) * right_.col(k).transpose();
  }
  return BipartiteVector::unnormalized(std::move(c));
}

SchmidtDecomposition schmidt_decompose(const BipartiteVector& state) {
  if (state.dim_a() != state.dim_b()) {
    throw std::invalid_argument("schmidt_decompose: d_A != d_B");
  }
  if (std::abs(state.squared_norm() - 1.0) > kNormTolerance) {
    throw std::invalid_argument("schmidt_decompose: state is not normalized");
  }
  // c = U S V^dagger, so c_jk = sum_n s_n U_jn conj(V_kn): the right Schmidt
  // vectors are the complex conjugates of V's columns. JacobiSVD already
  // returns singular values in decreasing order.
  Eigen::JacobiSVD<CMatrix> svd(state.coeffs(),
                                Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  std::vector<double> lambdas(s.data(), s.data() + s.size());
  return SchmidtDecomposition(std::move(lambdas), svd.matrixU(),
                              svd.matrixV().conjugate());
}

BipartiteVector tensor_product(const PureState& a, const PureState& b) {
  return BipartiteVector::state(a.amplitudes() * b.amplitudes().transpose());
}

ProjectedState project_alice(const BipartiteVector& phi, const PureState& psi,
                             const BipartiteVector& tele) {
  if (phi.dim_a() != psi.dim() || phi.dim_b() != tele.dim_a()) {
    throw std::invalid_argument("project_alice: dimension mismatch");
  }
  // sum_j conj(Phi_jk) psi_j is the k-th component of Phi^dagger psi.
  const CVector on_particle2 = phi.coeffs().adjoint() * psi.amplitudes();
  ProjectedState out;
  out.vector = tele.coeffs().transpose() * on_particle2;
  out.weight = out.vector.squaredNorm();
  return out;
}

double nuclear_norm(const Operator& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("nuclear_norm: operator is not square");
  }
  return Eigen::JacobiSVD<CMatrix>(a).singularValues().sum();
}

void require_normalized_lambdas(std::span<const double> lambdas, double tol) {
  if (lambdas.size() < 2) {
    throw std::invalid_argument("lambdas: need at least 2 coefficients");
  }
  double total = 0.0;
  for (double l : lambdas) {
    if (!(l >= 0.0)) {
      throw std::invalid_argument("lambdas: coefficients must be nonnegative");
    }
    total += l * l;
  }
  if (std::abs(total - 1.0) > tol) {
    throw std::invalid_argument("lambdas: sum of squares is " +
                                std::to_string(total) + ", expected 1");
  }
}

}  // namespace qtele
