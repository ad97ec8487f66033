#pragma once

// One round of adversarial GAE training: gradient ascent on
//   L(w^a(W), lambda) - phi(W)
// where the phi part is differentiated analytically and the Lagrangian part,
// which passes through an eigen-decomposition and a discrete row choice, is
// estimated with two-sided simultaneous perturbations (SPSA) of all weights.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gaepoison/attack/gae.hpp"
#include "gaepoison/attack/objective.hpp"
#include "gaepoison/core/error.hpp"
#include "gaepoison/core/rng.hpp"
#include "gaepoison/graph/signal.hpp"

namespace gaepoison::attack {

struct GaeTrainConfig {
  int epochs = 20;
  double lr = 0.01;
  int probes = 4;
  double radius = 1e-3;  // SPSA perturbation size
  EdgeTargets targets = EdgeTargets::clamp;
  graph::LaplacianKind laplacian = graph::LaplacianKind::degree;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const {
    if (epochs < 1) throw config_error("GAE epochs must be >= 1");
    if (!(lr >= 0.0)) throw config_error("GAE learning rate must be non-negative");
    if (probes < 1) throw config_error("GAE probes must be >= 1");
    if (!(radius > 0.0)) throw config_error("SPSA radius must be positive");
  }
};

struct CompositeValue {
  double lagrangian = 0.0;  // L(w^a, lambda)
  double loglik = 0.0;      // phi
  double value = 0.0;       // L - phi
  Synthesis synthesis;
};

/// Everything that stays fixed while the GAE weights move during one round.
class GaeRoundProblem {
 public:
  GaeRoundProblem(const Matrix& A, const Matrix& F, const DualState& dual, const AttackContext& ctx,
                  const GaeTrainConfig& cfg)
      : A_(A), ctx_(ctx), cfg_(cfg), evaluator_(ctx, dual) {
    if (F.rows() != static_cast<Eigen::Index>(ctx.observed_models.size()))
      throw contract_error("feature matrix rows do not match the observed models");
    if (A.rows() != F.rows() || A.cols() != F.rows()) throw contract_error("adjacency does not match the feature matrix");
    Z0_ = row_normalized(F);
    targets_ = edge_targets(A, cfg.targets);
    basis_ = graph::spectral_basis(graph::laplacian(A, cfg.laplacian));
    spectral_ = graph::forward_gft(basis_, F);
  }

  CompositeValue evaluate(const GaeModel& gae, const Matrix& mask = {}) const {
    const GcnCache cache = gcn_forward(gae, A_, Z0_, mask);
    return evaluate_embedding(cache.Z);
  }

  CompositeValue evaluate_embedding(const Matrix& Z) const {
    const Matrix A_hat = decode(Z).A_hat;
    CompositeValue v;
    v.synthesis = synthesize_malicious(A_hat, basis_, spectral_, evaluator_, ctx_, cfg_.laplacian);
    v.lagrangian = v.synthesis.terms.value;
    v.loglik = recon_loglik(A_hat, targets_);
    v.value = v.lagrangian - v.loglik;
    return v;
  }

  const Matrix& adjacency() const { return A_; }
  const Matrix& input() const { return Z0_; }
  const Matrix& targets() const { return targets_; }

 private:
  Matrix A_;
  const AttackContext& ctx_;
  GaeTrainConfig cfg_;
  ObjectiveEvaluator evaluator_;
  Matrix Z0_;
  Matrix targets_;
  graph::SpectralBasis basis_;
  Matrix spectral_;
};

struct GaeRoundResult {
  ModelVector malicious;
  double distance = 0.0;  // d(w^a, w_g^a) under the attacker's view of the aggregate
  Eigen::Index row = 0;
  ObjectiveTerms terms;
  double composite_before = 0.0;
  double composite_after = 0.0;
  std::vector<double> trace;  // composite value after each epoch, dropout off
};

namespace trainer_detail {

/// Fills `out` with independent +-1 entries.
inline void rademacher(Matrix& out, Rng& rng) {
  std::uint64_t bits = 0;
  int left = 0;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (left == 0) {
      bits = rng();
      left = 64;
    }
    out.data()[i] = (bits & 1u) ? 1.0 : -1.0;
    bits >>= 1;
    --left;
  }
}

struct Adam {
  Matrix m1, v1, m2, v2;
  int t = 0;

  Adam(const GaeModel& g)
      : m1(Matrix::Zero(g.W1.rows(), g.W1.cols())), v1(m1), m2(Matrix::Zero(g.W2.rows(), g.W2.cols())), v2(m2) {}

  void ascend(GaeModel& g, const GaeGradients& grad, const GaeTrainConfig& cfg) {
    ++t;
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    auto step = [&](Matrix& w, Matrix& m, Matrix& v, const Matrix& gr) {
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * gr;
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * gr.cwiseAbs2();
      w.array() += cfg.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.adam_eps);
    };
    step(g.W1, m1, v1, grad.dW1);
    step(g.W2, m2, v2, grad.dW2);
  }
};

}  // namespace trainer_detail

/// Trains `gae` in place for one communication round and returns the malicious
/// model synthesised from the final weights (dropout off).
inline GaeRoundResult train_gae_round(GaeModel& gae, const Matrix& A, const Matrix& F, const DualState& dual,
                                      const AttackContext& ctx, const GaeTrainConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const GaeRoundProblem problem(A, F, dual, ctx, cfg);
  const auto J = A.rows();

  GaeRoundResult out;
  out.composite_before = problem.evaluate(gae).value;
  trainer_detail::Adam adam(gae);
  Matrix d1(gae.W1.rows(), gae.W1.cols());
  Matrix d2(gae.W2.rows(), gae.W2.cols());

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    auto rng = make_rng(seed, {stream::gae_epoch, static_cast<std::uint64_t>(epoch)});
    const Matrix mask = gae.dropout_rate > 0.0 ? dropout_mask(J, gae.hidden(), gae.dropout_rate, rng) : Matrix{};

    // -phi, analytically.
    const GcnCache cache = gcn_forward(gae, problem.adjacency(), problem.input(), mask);
    const Matrix A_hat = decode(cache.Z).A_hat;
    GaeGradients grad = gcn_backprop(gae, cache, recon_loglik_grad(A_hat, problem.targets()));
    grad.dW1 = -grad.dW1;
    grad.dW2 = -grad.dW2;

    // L, by averaged two-sided simultaneous perturbation.
    const double scale = 1.0 / (2.0 * cfg.radius * cfg.probes);
    for (int p = 0; p < cfg.probes; ++p) {
      trainer_detail::rademacher(d1, rng);
      trainer_detail::rademacher(d2, rng);
      GaeModel plus = gae, minus = gae;
      plus.W1 += cfg.radius * d1;
      plus.W2 += cfg.radius * d2;
      minus.W1 -= cfg.radius * d1;
      minus.W2 -= cfg.radius * d2;
      const double diff = problem.evaluate(plus, mask).lagrangian - problem.evaluate(minus, mask).lagrangian;
      grad.dW1 += (diff * scale) * d1;
      grad.dW2 += (diff * scale) * d2;
    }
    if (!grad.dW1.allFinite() || !grad.dW2.allFinite())
      throw numeric_error("non-finite GAE gradient at epoch " + std::to_string(epoch));

    adam.ascend(gae, grad, cfg);
    const double value = problem.evaluate(gae).value;
    if (!std::isfinite(value)) throw numeric_error("non-finite GAE objective at epoch " + std::to_string(epoch));
    out.trace.push_back(value);
  }

  const CompositeValue final_value = problem.evaluate(gae);
  out.composite_after = final_value.value;
  out.malicious = final_value.synthesis.model;
  out.row = final_value.synthesis.row;
  out.terms = final_value.synthesis.terms;
  out.distance = final_value.synthesis.terms.distance;
  return out;
}

}  // namespace gaepoison::attack
