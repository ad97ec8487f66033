#pragma once

// Similarity graph over model vectors and its Laplacian spectral decomposition
// (graph Fourier transform basis) used to split models into graph structure
// and spectral features.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "gaepoison/core/error.hpp"
#include "gaepoison/core/model_vector.hpp"

namespace gaepoison::graph {

/// J x J pairwise cosine similarity of models; unit diagonal, symmetric.
struct SimilarityGraph {
  Matrix A;
};

enum class LaplacianKind {
  degree,       // diag(row sums of A) - A
  elementwise,  // diag(A_jj) - A
};

/// Orthogonal GFT basis. Columns are eigenvectors ordered by |eigenvalue|, descending.
struct SpectralBasis {
  Matrix B;
  Vector sigma;        // |eigenvalues|, non-increasing
  Vector eigenvalues;  // signed, same order as the columns of B

  Matrix reconstruct() const { return B * eigenvalues.asDiagonal() * B.transpose(); }
  Eigen::Index size() const { return B.rows(); }
};

/// Pairwise cosine similarity between the rows of `models` (one model per row).
inline SimilarityGraph cosine_adjacency(const Matrix& models) {
  const auto J = models.rows();
  if (J < 2) throw contract_error("similarity graph needs at least 2 models, got " + std::to_string(J));
  Matrix unit = models;
  for (Eigen::Index j = 0; j < J; ++j) {
    const double n = models.row(j).norm();
    if (!(n > 0.0) || !std::isfinite(n))
      throw degenerate_input_error("model of client " + std::to_string(j) + " has zero or non-finite norm");
    unit.row(j) /= n;
  }
  Matrix A(J, J);
  for (Eigen::Index j = 0; j < J; ++j) {
    A(j, j) = 1.0;
    for (Eigen::Index k = j + 1; k < J; ++k) {
      const double c = std::clamp(unit.row(j).dot(unit.row(k)), -1.0, 1.0);
      A(j, k) = c;
      A(k, j) = c;
    }
  }
  return {std::move(A)};
}

inline SimilarityGraph cosine_adjacency(const std::vector<ModelVector>& models) {
  return cosine_adjacency(stack_rows(models));
}

inline bool is_symmetric(const Matrix& m, double tol = 1e-10) {
  return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

inline Matrix laplacian(const Matrix& A, LaplacianKind kind = LaplacianKind::degree) {
  if (!is_symmetric(A)) throw contract_error("laplacian of a non-symmetric adjacency matrix");
  if (kind == LaplacianKind::degree) {
    Matrix L = -A;
    L.diagonal() += A.rowwise().sum();
    return L;
  }
  Matrix L = -A;
  L.diagonal() += A.diagonal();
  return L;
}

/// Eigen-decomposition L = B diag(eigenvalues) B^T of a symmetric Laplacian.
///
/// For symmetric L this is the SVD up to signs: sigma = |eigenvalues|. Each
/// column is signed so that its largest-magnitude entry is positive (ties go to
/// the lowest row index), which makes the basis of a given matrix unique up to
/// rotations inside repeated eigenspaces. The zero matrix maps to B = I.
inline SpectralBasis spectral_basis(const Matrix& L) {
  if (!is_symmetric(L)) throw contract_error("spectral basis of a non-symmetric matrix");
  const auto J = L.rows();
  if (!L.allFinite()) throw numeric_error("spectral basis of a matrix with non-finite entries");
  if (J == 0 || L.cwiseAbs().maxCoeff() == 0.0)
    return {Matrix::Identity(J, J), Vector::Zero(J), Vector::Zero(J)};

  Eigen::SelfAdjointEigenSolver<Matrix> es(L);
  if (es.info() != Eigen::Success) throw numeric_error("symmetric eigen-decomposition did not converge");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(J));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Vector& lam = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(lam(a)) > std::abs(lam(b)); });

  SpectralBasis out{Matrix(J, J), Vector(J), Vector(J)};
  for (Eigen::Index c = 0; c < J; ++c) {
    Vector v = es.eigenvectors().col(order[static_cast<std::size_t>(c)]);
    const double peak = v.cwiseAbs().maxCoeff();
    Eigen::Index lead = 0;
    while (std::abs(v(lead)) < peak * (1.0 - 1e-9)) ++lead;
    if (v(lead) < 0.0) v = -v;
    out.B.col(c) = v;
    out.eigenvalues(c) = lam(order[static_cast<std::size_t>(c)]);
    out.sigma(c) = std::abs(out.eigenvalues(c));
  }
  return out;
}

/// Spectral features S = B^T F (B^{-1} = B^T by orthogonality).
inline Matrix forward_gft(const SpectralBasis& basis, const Matrix& F) {
  if (basis.B.rows() != F.rows())
    throw contract_error("GFT basis of size " + std::to_string(basis.B.rows()) + " applied to " +
                         std::to_string(F.rows()) + " model rows");
  return basis.B.transpose() * F;
}

/// Recomposed models F_hat = B_hat S.
inline Matrix inverse_gft(const SpectralBasis& basis, const Matrix& S) {
  if (basis.B.cols() != S.rows())
    throw contract_error("GFT basis of size " + std::to_string(basis.B.cols()) + " applied to " +
                         std::to_string(S.rows()) + " spectral rows");
  Matrix F = basis.B * S;
  if (!F.allFinite()) throw numeric_error("inverse GFT produced non-finite values");
  return F;
}

}  // namespace gaepoison::graph
