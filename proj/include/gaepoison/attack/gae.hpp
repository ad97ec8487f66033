#pragma once

// Two-layer GCN encoder with an inner-product decoder, the Bernoulli
// reconstruction log-likelihood, and the exact backward pass through them.
//
//   N  = D^-1/2 (A + I) D^-1/2
//   Z1 = relu(N Z0 W1),  Z2 = tanh(N (Z1 * mask) W2)
//   A_hat = sigmoid(Z2 Z2^T)
//   phi = sum_jk t_jk log A_hat_jk + (1 - t_jk) log(1 - A_hat_jk)

#include <cmath>
#include <string>

#include "gaepoison/core/error.hpp"
#include "gaepoison/core/model_vector.hpp"
#include "gaepoison/core/rng.hpp"

namespace gaepoison::attack {

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct GaeModel {
  Matrix W1;  // D_model x hidden
  Matrix W2;  // hidden x embed
  double dropout_rate = 0.0;

  Eigen::Index input_dim() const { return W1.rows(); }
  Eigen::Index hidden() const { return W1.cols(); }
  Eigen::Index embed() const { return W2.cols(); }

  /// Glorot-uniform initialisation.
  static GaeModel init(Eigen::Index input_dim, Eigen::Index hidden, Eigen::Index embed, double dropout_rate, Rng& rng) {
    if (hidden < 1 || embed < 1 || input_dim < 1) throw config_error("GAE layer sizes must be positive");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw config_error("GAE dropout rate must lie in [0,1)");
    auto glorot = [&](Eigen::Index rows, Eigen::Index cols) {
      const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
      Matrix m(rows, cols);
      for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = (2.0 * uniform01(rng) - 1.0) * limit;
      return m;
    };
    GaeModel g;
    g.W1 = glorot(input_dim, hidden);
    g.W2 = glorot(hidden, embed);
    g.dropout_rate = dropout_rate;
    return g;
  }
};

struct GaeGradients {
  Matrix dW1;
  Matrix dW2;
};

struct ReconstructedGraph {
  Matrix A_hat;
};

/// Intermediates of one forward pass, consumed by gcn_backprop.
struct GcnCache {
  Matrix N;     // normalised adjacency
  Matrix NZ0;   // N Z0
  Matrix P1;    // pre-activation of layer 1
  Matrix mask;  // dropout scaling on Z1; empty when dropout is off
  Matrix NH1;   // N (Z1 * mask)
  Matrix Z;     // layer-2 output, the node embedding
};

enum class EdgeTargets {
  clamp,  // clamp(A, 0, 1)
  shift,  // (A + 1) / 2
};

inline Matrix edge_targets(const Matrix& A, EdgeTargets mapping = EdgeTargets::clamp) {
  if (mapping == EdgeTargets::clamp) return A.cwiseMax(0.0).cwiseMin(1.0);
  return ((A.array() + 1.0) * 0.5).matrix();
}

/// D^-1/2 (A + I) D^-1/2 with D the row sums of A + I.
inline Matrix normalize_adjacency(const Matrix& A) {
  if (A.rows() != A.cols()) throw contract_error("adjacency must be square");
  const Matrix tilde = A + Matrix::Identity(A.rows(), A.cols());
  const Vector deg = tilde.rowwise().sum();
  for (Eigen::Index j = 0; j < deg.size(); ++j)
    if (!(deg(j) > 0.0)) throw degenerate_input_error("node " + std::to_string(j) + " has non-positive degree");
  const Vector inv_sqrt = deg.cwiseSqrt().cwiseInverse();
  Matrix N = inv_sqrt.asDiagonal() * tilde * inv_sqrt.asDiagonal();
  // Symmetrise exactly; the scaling above is symmetric only up to rounding.
  return 0.5 * (N + N.transpose());
}

/// Inverted-dropout mask: entries are 0 with probability `rate`, else 1/(1-rate).
inline Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
  Matrix m(rows, cols);
  const double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = uniform01(rng) < rate ? 0.0 : keep;
  return m;
}

/// Rows of F scaled to unit norm (zero rows stay zero).
inline Matrix row_normalized(const Matrix& F) {
  Matrix out = F;
  for (Eigen::Index j = 0; j < out.rows(); ++j) {
    const double n = out.row(j).norm();
    if (n > 0.0) out.row(j) /= n;
  }
  return out;
}

inline GcnCache gcn_forward(const GaeModel& gae, const Matrix& A, const Matrix& Z0, const Matrix& mask = {}) {
  if (Z0.rows() != A.rows()) throw contract_error("GCN input has " + std::to_string(Z0.rows()) + " rows for a " +
                                                  std::to_string(A.rows()) + "-node graph");
  if (Z0.cols() != gae.W1.rows())
    throw contract_error("GCN input width " + std::to_string(Z0.cols()) + " does not match W1 rows " +
                         std::to_string(gae.W1.rows()));
  if (gae.W1.cols() != gae.W2.rows()) throw contract_error("W1 and W2 inner dimensions differ");
  if (mask.size() != 0 && (mask.rows() != A.rows() || mask.cols() != gae.W1.cols()))
    throw contract_error("dropout mask shape does not match the hidden layer");

  GcnCache c;
  c.N = normalize_adjacency(A);
  c.NZ0 = c.N * Z0;
  c.P1 = c.NZ0 * gae.W1;
  Matrix H1 = c.P1.cwiseMax(0.0);
  if (mask.size() != 0) {
    c.mask = mask;
    H1 = H1.cwiseProduct(mask);
  }
  c.NH1 = c.N * H1;
  c.Z = (c.NH1 * gae.W2).array().tanh().matrix();
  return c;
}

inline ReconstructedGraph decode(const Matrix& Z) {
  const Matrix logits = Z * Z.transpose();
  Matrix A_hat = (1.0 / (1.0 + (-logits.array()).exp())).matrix();
  A_hat = 0.5 * (A_hat + A_hat.transpose());
  return {std::move(A_hat)};
}

/// Bernoulli log-likelihood of `targets` under edge probabilities `A_hat` (always <= 0).
inline double recon_loglik(const Matrix& A_hat, const Matrix& targets) {
  if (A_hat.rows() != targets.rows() || A_hat.cols() != targets.cols())
    throw contract_error("reconstruction and target graphs differ in shape");
  return (targets.array() * A_hat.array().log() + (1.0 - targets.array()) * (1.0 - A_hat.array()).log()).sum();
}

/// d phi / d A_hat.
inline Matrix recon_loglik_grad(const Matrix& A_hat, const Matrix& targets) {
  return (targets.array() / A_hat.array() - (1.0 - targets.array()) / (1.0 - A_hat.array())).matrix();
}

/// Gradients of a scalar objective w.r.t. W1 and W2 given its gradient w.r.t. A_hat.
inline GaeGradients gcn_backprop(const GaeModel& gae, const GcnCache& cache, const Matrix& dA_hat) {
  const auto J = cache.Z.rows();
  if (dA_hat.rows() != J || dA_hat.cols() != J) throw contract_error("upstream gradient shape does not match the graph");
  if (cache.NH1.cols() != gae.W2.rows() || cache.Z.cols() != gae.W2.cols() || cache.NZ0.cols() != gae.W1.rows() ||
      cache.P1.cols() != gae.W1.cols())
    throw contract_error("forward cache does not belong to these weights");

  const Matrix A_hat = decode(cache.Z).A_hat;
  const Matrix dX = dA_hat.cwiseProduct((A_hat.array() * (1.0 - A_hat.array())).matrix());
  const Matrix dZ = (dX + dX.transpose()) * cache.Z;
  const Matrix dP2 = dZ.cwiseProduct((1.0 - cache.Z.array().square()).matrix());

  GaeGradients g;
  g.dW2 = cache.NH1.transpose() * dP2;
  Matrix dH1 = cache.N.transpose() * dP2 * gae.W2.transpose();
  if (cache.mask.size() != 0) dH1 = dH1.cwiseProduct(cache.mask);
  const Matrix dP1 = (cache.P1.array() > 0.0).select(dH1.array(), 0.0).matrix();
  g.dW1 = cache.NZ0.transpose() * dP1;
  return g;
}

}  // namespace gaepoison::attack
