#pragma once

#include <span>
#include <vector>

#include "gaepoison/core/error.hpp"
#include "gaepoison/core/model_vector.hpp"

namespace gaepoison::fl {

/// D_k / sum(D), in input order.
inline std::vector<double> aggregation_weights(std::span<const std::size_t> sizes) {
  if (sizes.empty()) throw contract_error("aggregation weights of an empty size list");
  double total = 0.0;
  for (auto s : sizes) {
    if (s == 0) throw contract_error("reported data sizes must be positive");
    total += static_cast<double>(s);
  }
  std::vector<double> w;
  w.reserve(sizes.size());
  for (auto s : sizes) w.push_back(static_cast<double>(s) / total);
  return w;
}

/// FedAvg: data-size weighted mean, reduced in input order.
///
/// Accumulated as a running weighted mean, so a list of identical models
/// returns that model bit-for-bit.
inline ModelVector aggregate(std::span<const ModelVector> models, std::span<const std::size_t> sizes) {
  if (models.empty()) throw contract_error("aggregate of an empty model list");
  if (models.size() != sizes.size())
    throw contract_error("aggregate got " + std::to_string(models.size()) + " models but " +
                         std::to_string(sizes.size()) + " sizes");
  for (auto s : sizes)
    if (s == 0) throw contract_error("reported data sizes must be positive");
  Vector acc = models.front().values();
  double seen = static_cast<double>(sizes.front());
  for (std::size_t k = 1; k < models.size(); ++k) {
    if (models[k].size() != acc.size()) throw contract_error("model " + std::to_string(k) + " has a different dimension");
    seen += static_cast<double>(sizes[k]);
    acc += (static_cast<double>(sizes[k]) / seen) * (models[k].values() - acc);
  }
  return ModelVector(std::move(acc));
}

}  // namespace gaepoison::fl
