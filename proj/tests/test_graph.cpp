#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace gaepoison;
using namespace fixtures;

namespace {

ModelVector mv(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return ModelVector(v);
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(CosineAdjacency, IdenticalModels) {
  const auto A = graph::cosine_adjacency(std::vector<ModelVector>{mv({1, 2, 3}), mv({1, 2, 3})}).A;
  EXPECT_LT(max_abs(A - Matrix::Ones(2, 2)), 1e-15);
}

TEST(CosineAdjacency, Orthogonal) {
  const auto A = graph::cosine_adjacency(std::vector<ModelVector>{mv({1, 0}), mv({0, 1})}).A;
  EXPECT_EQ(A(0, 1), 0.0);
  EXPECT_EQ(A(0, 0), 1.0);
}

TEST(CosineAdjacency, FortyFiveDegrees) {
  const auto A = graph::cosine_adjacency(std::vector<ModelVector>{mv({1, 1}), mv({1, 0})}).A;
  EXPECT_NEAR(A(0, 1), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_EQ(A(0, 1), A(1, 0));
}

TEST(CosineAdjacency, InvariantsAndScaleInvariance) {
  auto g = rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ModelVector> ms;
    for (int j = 0; j < 6; ++j) ms.push_back(random_model(20, g));
    const Matrix A = graph::cosine_adjacency(ms).A;
    EXPECT_TRUE(graph::is_symmetric(A, 1e-10));
    for (int j = 0; j < 6; ++j) EXPECT_EQ(A(j, j), 1.0);
    EXPECT_LE(max_abs(A), 1.0);
    ms[2].values() *= 7.5;
    ms[4].values() *= 0.01;
    EXPECT_LT(max_abs(graph::cosine_adjacency(ms).A - A), 1e-12);
  }
}

TEST(CosineAdjacency, ZeroModelNamesClient) {
  try {
    graph::cosine_adjacency(std::vector<ModelVector>{mv({1, 0}), mv({0, 0}), mv({0, 1})});
    FAIL() << "expected degenerate_input_error";
  } catch (const degenerate_input_error& e) {
    EXPECT_NE(std::string(e.what()).find("1"), std::string::npos);
  }
  EXPECT_THROW(graph::cosine_adjacency(std::vector<ModelVector>{mv({1, 0})}), contract_error);
}

TEST(Laplacian, Examples) {
  Matrix ones = Matrix::Ones(2, 2);
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  EXPECT_EQ(graph::laplacian(ones), expected);
  EXPECT_EQ(graph::laplacian(Matrix::Identity(2, 2)), Matrix::Zero(2, 2));
}

TEST(Laplacian, RowsSumToZero) {
  auto g = rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix L = graph::laplacian(random_symmetric(5, g));
    EXPECT_LT(max_abs(L * Vector::Ones(5)), 1e-10);
    EXPECT_TRUE(graph::is_symmetric(L, 0.0));
  }
}

TEST(Laplacian, ElementwiseVariantAndSymmetryCheck) {
  Matrix A(2, 2);
  A << 1, 0.5, 0.5, 1;
  Matrix expected(2, 2);
  expected << 0, -0.5, -0.5, 0;
  EXPECT_EQ(graph::laplacian(A, graph::LaplacianKind::elementwise), expected);
  A(0, 1) = 0.4;
  EXPECT_THROW(graph::laplacian(A), contract_error);
}

TEST(SpectralBasis, ZeroMatrixIsIdentity) {
  const auto b = graph::spectral_basis(Matrix::Zero(4, 4));
  EXPECT_EQ(b.B, Matrix::Identity(4, 4));
  EXPECT_EQ(b.sigma, Vector::Zero(4));
}

TEST(SpectralBasis, TwoNodeHandOracle) {
  Matrix L(2, 2);
  L << 1, -1, -1, 1;
  const auto b = graph::spectral_basis(L);
  EXPECT_NEAR(b.sigma[0], 2.0, 1e-12);
  EXPECT_NEAR(b.sigma[1], 0.0, 1e-12);
  const double r = 1.0 / std::sqrt(2.0);
  // tie in magnitude: the lower row index carries the positive sign
  EXPECT_NEAR(b.B(0, 0), r, 1e-12);
  EXPECT_NEAR(b.B(1, 0), -r, 1e-12);
  EXPECT_NEAR(b.B(0, 1), r, 1e-12);
  EXPECT_NEAR(b.B(1, 1), r, 1e-12);
}

TEST(SpectralBasis, RandomReconstructionOrthogonalitySignsAndOrder) {
  auto g = rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix L = random_symmetric(6, g);
    const auto b = graph::spectral_basis(L);
    EXPECT_LT(max_abs(b.reconstruct() - L), 1e-8);
    EXPECT_LT(max_abs(b.B.transpose() * b.B - Matrix::Identity(6, 6)), 1e-8);
    EXPECT_LT(max_abs(b.B * b.B.transpose() - Matrix::Identity(6, 6)), 1e-8);
    for (int c = 0; c < 6; ++c) {
      EXPECT_GE(b.sigma[c], 0.0);
      if (c > 0) {
        EXPECT_GE(b.sigma[c - 1], b.sigma[c]);
      }
      Eigen::Index lead;
      b.B.col(c).cwiseAbs().maxCoeff(&lead);
      EXPECT_GT(b.B(lead, c), 0.0);
    }
    const auto again = graph::spectral_basis(L);
    EXPECT_EQ(again.B, b.B);
  }
}

TEST(SpectralBasis, RejectsAsymmetric) {
  Matrix L(2, 2);
  L << 1, 2, 3, 4;
  EXPECT_THROW(graph::spectral_basis(L), contract_error);
}

TEST(Gft, IdentityBasis) {
  auto g = rng(24);
  const Matrix F = random_matrix(4, 9, g);
  const graph::SpectralBasis I{Matrix::Identity(4, 4), Vector::Zero(4), Vector::Zero(4)};
  EXPECT_EQ(graph::forward_gft(I, F), F);
}

TEST(Gft, TwoByTwoHandProduct) {
  const double a = 0.6, b = 0.8;
  graph::SpectralBasis B{Matrix(2, 2), Vector::Zero(2), Vector::Zero(2)};
  B.B << a, b, -b, a;
  Matrix F(2, 2);
  F << 1, 2, 3, 4;
  Matrix S(2, 2);
  // B^T F by hand
  S << a * 1 - b * 3, a * 2 - b * 4, b * 1 + a * 3, b * 2 + a * 4;
  EXPECT_LT(max_abs(graph::forward_gft(B, F) - S), 1e-15);
}

TEST(Gft, InverseThreeByThreeHandProductAndZero) {
  auto g = rng(25);
  const Matrix Bm = random_matrix(3, 3, g);
  const Matrix S = random_matrix(3, 4, g);
  const graph::SpectralBasis B{Bm, Vector::Zero(3), Vector::Zero(3)};
  Matrix oracle = Matrix::Zero(3, 4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 3; ++k) oracle(i, j) += Bm(i, k) * S(k, j);
  EXPECT_LT(max_abs(graph::inverse_gft(B, S) - oracle), 1e-14);
  EXPECT_EQ(graph::inverse_gft(B, Matrix::Zero(3, 4)), Matrix::Zero(3, 4));
}

TEST(Gft, ShapeMismatch) {
  const graph::SpectralBasis B{Matrix::Identity(3, 3), Vector::Zero(3), Vector::Zero(3)};
  EXPECT_THROW(graph::forward_gft(B, Matrix::Zero(4, 2)), contract_error);
  EXPECT_THROW(graph::inverse_gft(B, Matrix::Zero(2, 2)), contract_error);
}

TEST(Gft, RoundTripThroughModelGraph) {
  auto g = rng(26);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ms = clustered_models(5, 30, g, 0.3);
    const Matrix F = stack_rows(ms);
    const auto basis = graph::spectral_basis(graph::laplacian(graph::cosine_adjacency(ms).A));
    EXPECT_LT(max_abs(graph::inverse_gft(basis, graph::forward_gft(basis, F)) - F), 1e-10);
  }
}
