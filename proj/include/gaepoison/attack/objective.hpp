#pragma once

// Lagrangian attack objective, dual bookkeeping and malicious-model synthesis
// from a reconstructed similarity graph.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gaepoison/core/error.hpp"
#include "gaepoison/core/model_vector.hpp"
#include "gaepoison/fl/aggregate.hpp"
#include "gaepoison/fl/dataset.hpp"
#include "gaepoison/fl/svm.hpp"
#include "gaepoison/graph/signal.hpp"

namespace gaepoison::attack {

enum class ObjectiveMode {
  surrogate,  // data-free: displacement of the global model against the benign consensus update
  oracle,     // SVM loss of the would-be global model on a probe set
};

enum class DualSign {
  standard,  // lambda <- [lambda + eps (d - d_T)]+
  literal,   // lambda <- [lambda - eps (d - d_T)]+
};

struct DualState {
  double lambda = 1.0;
  double d_T = 1.0;
  double epsilon = 1.0;
};

/// What the attacker knows in one round.
struct AttackContext {
  std::vector<ModelVector> observed_models;  // eavesdropped benign uploads
  std::vector<std::size_t> observed_sizes;   // their reported D_j
  ModelVector prev_global;
  std::size_t claimed_size = 1;  // D_a
  ObjectiveMode mode = ObjectiveMode::surrogate;
  const fl::Dataset* probe_set = nullptr;  // oracle mode only
  double mu = 1.0;                         // regulariser used by the oracle loss

  void validate() const {
    if (observed_models.empty()) throw contract_error("attack context has no observed models");
    if (observed_models.size() != observed_sizes.size())
      throw contract_error("observed models and sizes differ in length");
    if (claimed_size == 0) throw contract_error("claimed data size D_a must be positive");
    for (const auto& m : observed_models)
      if (m.size() != prev_global.size()) throw contract_error("observed model dimension differs from the global model");
    if (mode == ObjectiveMode::oracle && probe_set == nullptr)
      throw config_error("oracle objective mode requires a probe set");
  }
};

/// Both terms of the Lagrangian for one candidate.
struct ObjectiveTerms {
  double loss = 0.0;      // F(w_g^a), or its surrogate
  double distance = 0.0;  // d(w^a, w_g^a)
  double value = 0.0;     // loss + lambda (d_T - d)
};

/// Precomputed per-round quantities so that many candidates can be scored cheaply.
class ObjectiveEvaluator {
 public:
  ObjectiveEvaluator(const AttackContext& ctx, const DualState& dual)
      : dual_(dual), prev_global_(ctx.prev_global.values()), mode_(ctx.mode), probe_set_(ctx.probe_set), mu_(ctx.mu) {
    ctx.validate();
    std::vector<ModelVector> models = ctx.observed_models;
    benign_mean_ = fl::aggregate(models, ctx.observed_sizes).values();
    double benign_total = 0.0;
    for (auto s : ctx.observed_sizes) benign_total += static_cast<double>(s);
    attacker_weight_ = static_cast<double>(ctx.claimed_size) / (benign_total + static_cast<double>(ctx.claimed_size));
    consensus_ = benign_mean_ - ctx.prev_global.values();
    consensus_norm_ = consensus_.norm();
  }

  /// w_g^a = (1 - a) * benign weighted mean + a * candidate, a = D_a / D.
  Vector contaminated_global(const Vector& candidate) const {
    return (1.0 - attacker_weight_) * benign_mean_ + attacker_weight_ * candidate;
  }

  ObjectiveTerms terms(const Vector& candidate) const {
    if (candidate.size() != benign_mean_.size()) throw contract_error("candidate model has the wrong dimension");
    const Vector global = contaminated_global(candidate);
    ObjectiveTerms t;
    if (mode_ == ObjectiveMode::surrogate) {
      t.loss = consensus_norm_ > 0.0 ? -(global - prev_global_).dot(consensus_) / consensus_norm_ : 0.0;
    } else {
      t.loss = fl::svm_loss(ModelVector(global), *probe_set_, mu_);
    }
    t.distance = (candidate - global).norm();
    t.value = t.loss + dual_.lambda * (dual_.d_T - t.distance);
    return t;
  }

  double attacker_weight() const { return attacker_weight_; }

 private:
  DualState dual_;
  Vector prev_global_;
  ObjectiveMode mode_;
  const fl::Dataset* probe_set_;
  double mu_;
  Vector benign_mean_;
  Vector consensus_;
  double consensus_norm_ = 0.0;
  double attacker_weight_ = 0.0;
};

/// L(w^a, lambda) = F(w_g^a) + lambda (d_T - d(w^a, w_g^a)).
inline double attack_objective(const ModelVector& candidate, const DualState& dual, const AttackContext& ctx) {
  return ObjectiveEvaluator(ctx, dual).terms(candidate.values()).value;
}

inline DualState dual_update(const DualState& dual, double achieved_distance, DualSign sign = DualSign::standard) {
  DualState next = dual;
  const double step = dual.epsilon * (achieved_distance - dual.d_T);
  next.lambda = std::max(0.0, sign == DualSign::standard ? dual.lambda + step : dual.lambda - step);
  return next;
}

struct Synthesis {
  ModelVector model;
  Eigen::Index row = 0;
  ObjectiveTerms terms;
};

/// Recomposes the observed models through the reconstructed graph and keeps the
/// row that maximises the attack objective (ties go to the lowest row).
///
/// `benign_basis` and `spectral` are the GFT basis of the observed graph and
/// S = B^T F, with F the rows of ctx.observed_models. When the reconstructed basis coincides with the
/// benign one and S is exactly that transform, B_hat S = F and the observed rows are used as they are.
inline Synthesis synthesize_malicious(const Matrix& A_hat, const graph::SpectralBasis& benign_basis,
                                      const Matrix& spectral, const ObjectiveEvaluator& objective,
                                      const AttackContext& ctx,
                                      graph::LaplacianKind kind = graph::LaplacianKind::degree) {
  const auto J = spectral.rows();
  if (A_hat.rows() != J || A_hat.cols() != J || benign_basis.size() != J)
    throw contract_error("reconstructed graph, basis and spectral features disagree on the node count");
  const graph::SpectralBasis basis_hat = graph::spectral_basis(graph::laplacian(A_hat, kind));

  bool identity = basis_hat.B.size() == benign_basis.B.size() &&
                  (basis_hat.B.array() == benign_basis.B.array()).all() &&
                  static_cast<Eigen::Index>(ctx.observed_models.size()) == J;
  Matrix observed;
  if (identity) {
    observed = stack_rows(ctx.observed_models);
    const Matrix expected = graph::forward_gft(benign_basis, observed);
    identity = expected.cols() == spectral.cols() && (expected.array() == spectral.array()).all();
  }
  const Matrix recomposed = identity ? observed : graph::inverse_gft(basis_hat, spectral);

  Synthesis best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < J; ++r) {
    const Vector row = recomposed.row(r).transpose();
    const ObjectiveTerms t = objective.terms(row);
    if (!std::isfinite(t.value)) throw numeric_error("attack objective is not finite for row " + std::to_string(r));
    if (t.value > best_value) {
      best_value = t.value;
      best = Synthesis{ModelVector(row), r, t};
    }
  }
  return best;
}

}  // namespace gaepoison::attack
