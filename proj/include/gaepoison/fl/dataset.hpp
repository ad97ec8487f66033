#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gaepoison/core/error.hpp"
#include "gaepoison/core/model_vector.hpp"

namespace gaepoison::fl {

/// Feature matrix (one sample per row, values in [0,1]) with integer labels.
struct Dataset {
  RowMatrix features;
  std::vector<int> labels;
  int n_classes = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t n_features() const { return static_cast<std::size_t>(features.cols()); }
  ModelShape model_shape() const {
    return {static_cast<std::size_t>(n_classes), n_features()};
  }

  void validate() const {
    if (labels.empty()) throw contract_error("dataset has no samples");
    if (static_cast<std::size_t>(features.rows()) != labels.size())
      throw contract_error("dataset feature rows (" + std::to_string(features.rows()) +
                           ") and labels (" + std::to_string(labels.size()) + ") differ");
    if (!features.allFinite()) throw contract_error("dataset features contain non-finite values");
    for (int y : labels)
      if (y < 0 || y >= n_classes)
        throw contract_error("label " + std::to_string(y) + " outside 0.." + std::to_string(n_classes - 1));
  }

  /// First `n` samples (all of them when n == 0 or n >= size()).
  Dataset head(std::size_t n) const {
    if (n == 0 || n >= size()) return *this;
    Dataset out;
    out.features = features.topRows(static_cast<Eigen::Index>(n));
    out.labels.assign(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n));
    out.n_classes = n_classes;
    return out;
  }

  Dataset select(std::span<const std::size_t> rows) const {
    Dataset out;
    out.n_classes = n_classes;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      detail::require(rows[i] < size(), "row index out of range");
      out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
      out.labels.push_back(labels[rows[i]]);
    }
    return out;
  }
};

}  // namespace gaepoison::fl
