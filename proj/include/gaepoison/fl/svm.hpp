#pragma once

// One-vs-rest linear SVM: C independent binary problems
//   (mu/2)||w_c||^2 + (1/n) sum_i max(0, 1 - y_ic (b_c + w_c . x_i)),  y_ic = +1 iff label_i == c,
// sharing one flattened ModelVector. Biases are not regularised.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "gaepoison/core/error.hpp"
#include "gaepoison/core/model_vector.hpp"
#include "gaepoison/core/rng.hpp"
#include "gaepoison/fl/dataset.hpp"

namespace gaepoison::fl {

struct LocalTrainConfig {
  int local_iterations = 10;  // T_L
  double eta = 0.01;
  double mu = 1.0;
  /// Mini-batch size of one sub-gradient step; 0 trains full-batch (one step per iteration).
  std::size_t batch_size = 0;
};

namespace svm_detail {

inline void check_dims(const ModelVector& model, const Dataset& data) {
  if (static_cast<std::size_t>(model.size()) != data.model_shape().size())
    throw contract_error("model dimension " + std::to_string(model.size()) + " does not match dataset (" +
                         std::to_string(data.n_classes) + " classes x " + std::to_string(data.n_features()) +
                         " features + bias)");
}

/// +1/-1 one-vs-rest targets, n x C.
inline RowMatrix ovr_targets(const std::vector<int>& labels, std::span<const std::size_t> rows, int n_classes) {
  RowMatrix y = RowMatrix::Constant(static_cast<Eigen::Index>(rows.size()), n_classes, -1.0);
  for (std::size_t i = 0; i < rows.size(); ++i) y(static_cast<Eigen::Index>(i), labels[rows[i]]) = 1.0;
  return y;
}

}  // namespace svm_detail

/// Class scores b_c + w_c . x for every sample, n x C.
inline RowMatrix class_scores(const ModelVector& model, const Dataset& data) {
  svm_detail::check_dims(model, data);
  const auto shape = data.model_shape();
  const auto wb = model.as_matrix(shape);
  const auto d = static_cast<Eigen::Index>(shape.n_features);
  RowMatrix s = data.features * wb.leftCols(d).transpose();
  s.rowwise() += wb.col(d).transpose();
  return s;
}

/// Mean over classes of the per-class regularised hinge objective. Equals 1 at the zero model.
inline double svm_loss(const ModelVector& model, const Dataset& data, double mu = 1.0) {
  svm_detail::check_dims(model, data);
  if (data.size() == 0) throw contract_error("svm_loss on an empty dataset");
  const auto shape = data.model_shape();
  const auto wb = model.as_matrix(shape);
  const auto d = static_cast<Eigen::Index>(shape.n_features);
  const RowMatrix scores = class_scores(model, data);
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const RowMatrix y = svm_detail::ovr_targets(data.labels, all, data.n_classes);
  const Eigen::ArrayXd hinge =
      (1.0 - (y.array() * scores.array())).max(0.0).colwise().sum().transpose() / static_cast<double>(data.size());
  const Eigen::ArrayXd reg = 0.5 * mu * wb.leftCols(d).rowwise().squaredNorm().array();
  return (hinge + reg).mean();
}

/// Per-class sub-gradient of the OvR objective on the given rows, in ModelVector layout.
/// Each class block holds the gradient of its own binary problem (not divided by C).
inline Vector ovr_subgradient(const ModelVector& model, const Dataset& data, std::span<const std::size_t> rows,
                              double mu) {
  const auto shape = data.model_shape();
  const auto wb = model.as_matrix(shape);
  const auto d = static_cast<Eigen::Index>(shape.n_features);
  const auto n = static_cast<Eigen::Index>(rows.size());
  detail::require(n > 0, "sub-gradient over an empty batch");

  RowMatrix xb(n, d);
  for (Eigen::Index i = 0; i < n; ++i) xb.row(i) = data.features.row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]));
  const RowMatrix y = svm_detail::ovr_targets(data.labels, rows, data.n_classes);
  RowMatrix scores = xb * wb.leftCols(d).transpose();
  scores.rowwise() += wb.col(d).transpose();
  // d/ds of max(0, 1 - y s) is -y on the active set (margin < 1), 0 elsewhere.
  const RowMatrix g = (y.array() * scores.array() < 1.0).select(-y.array(), 0.0).matrix();

  Vector out(static_cast<Eigen::Index>(shape.size()));
  Eigen::Map<RowMatrix> gw(out.data(), static_cast<Eigen::Index>(shape.n_classes), d + 1);
  gw.leftCols(d) = mu * wb.leftCols(d) + (g.transpose() * xb) / static_cast<double>(n);
  gw.col(d) = g.colwise().sum().transpose() / static_cast<double>(n);
  return out;
}

/// T_L local iterations of sub-gradient descent starting from `start`.
///
/// A local iteration is one pass over the shard: a single full-batch step when
/// batch_size is 0, otherwise ceil(n / batch_size) mini-batch steps over an
/// order shuffled by `rng`.
inline ModelVector local_train(const Dataset& data, const ModelVector& start, const LocalTrainConfig& cfg, Rng& rng) {
  svm_detail::check_dims(start, data);
  if (cfg.local_iterations < 0) throw contract_error("local_iterations must be non-negative");
  if (data.size() == 0) throw contract_error("local_train on an empty shard");
  ModelVector w = start;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch = cfg.batch_size == 0 ? data.size() : std::min(cfg.batch_size, data.size());

  for (int it = 0; it < cfg.local_iterations; ++it) {
    if (cfg.batch_size != 0) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t at = 0; at < order.size(); at += batch) {
      const std::size_t len = std::min(batch, order.size() - at);
      const Vector grad = ovr_subgradient(w, data, std::span<const std::size_t>(order).subspan(at, len), cfg.mu);
      if (!grad.allFinite())
        throw numeric_error("non-finite sub-gradient at local iteration " + std::to_string(it + 1));
      w.values() -= cfg.eta * grad;
    }
  }
  return w;
}

/// Fraction of samples whose arg-max class score equals the label; ties go to the lowest class.
inline double evaluate_accuracy(const ModelVector& model, const Dataset& data) {
  if (data.size() == 0) throw contract_error("accuracy of an empty dataset");
  const RowMatrix scores = class_scores(model, data);
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c)
      if (scores(i, c) > scores(i, best)) best = c;
    if (best == data.labels[static_cast<std::size_t>(i)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace gaepoison::fl
