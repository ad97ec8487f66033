#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "gaepoison/core/error.hpp"

namespace gaepoison {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Layout of a one-vs-rest linear classifier: C blocks of (d weights, 1 bias).
struct ModelShape {
  std::size_t n_classes = 0;
  std::size_t n_features = 0;

  std::size_t block() const { return n_features + 1; }
  std::size_t size() const { return n_classes * block(); }
  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

/// Flattened parameter vector of one local or global model.
///
/// Entry `c * (d + 1) + k` is weight k of class c for k < d; entry
/// `c * (d + 1) + d` is the bias of class c.
class ModelVector {
 public:
  ModelVector() = default;
  explicit ModelVector(Vector values) : values_(std::move(values)) {}

  static ModelVector zeros(const ModelShape& shape) {
    return ModelVector(Vector::Zero(static_cast<Eigen::Index>(shape.size())));
  }

  const Vector& values() const { return values_; }
  Vector& values() { return values_; }
  Eigen::Index size() const { return values_.size(); }
  bool all_finite() const { return values_.allFinite(); }

  /// C x (d+1) row-major view: column d holds the biases.
  Eigen::Map<const RowMatrix> as_matrix(const ModelShape& shape) const {
    detail::require(static_cast<std::size_t>(values_.size()) == shape.size(),
                    "model dimension " + std::to_string(values_.size()) +
                        " does not match shape " + std::to_string(shape.size()));
    return {values_.data(), static_cast<Eigen::Index>(shape.n_classes),
            static_cast<Eigen::Index>(shape.block())};
  }
  Eigen::Map<RowMatrix> as_matrix(const ModelShape& shape) {
    detail::require(static_cast<std::size_t>(values_.size()) == shape.size(),
                    "model dimension " + std::to_string(values_.size()) +
                        " does not match shape " + std::to_string(shape.size()));
    return {values_.data(), static_cast<Eigen::Index>(shape.n_classes),
            static_cast<Eigen::Index>(shape.block())};
  }

  friend bool operator==(const ModelVector& a, const ModelVector& b) {
    return a.values_.size() == b.values_.size() && (a.values_.array() == b.values_.array()).all();
  }

 private:
  Vector values_;
};

inline double euclidean_distance(const ModelVector& a, const ModelVector& b) {
  detail::require(a.size() == b.size(), "distance between models of different dimension");
  return (a.values() - b.values()).norm();
}

/// Stacks models as the rows of a J x D matrix.
inline Matrix stack_rows(const std::vector<ModelVector>& models) {
  detail::require(!models.empty(), "cannot stack an empty model list");
  Matrix out(static_cast<Eigen::Index>(models.size()), models.front().size());
  for (std::size_t j = 0; j < models.size(); ++j) {
    detail::require(models[j].size() == out.cols(), "model dimension mismatch at row " + std::to_string(j));
    out.row(static_cast<Eigen::Index>(j)) = models[j].values().transpose();
  }
  return out;
}

}  // namespace gaepoison
