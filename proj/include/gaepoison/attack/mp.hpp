#pragma once

// Fake-device baseline: the global model pushed a fixed distance along a random direction.

#include <cmath>
#include <cstdint>
#include <random>

#include "gaepoison/core/error.hpp"
#include "gaepoison/core/model_vector.hpp"
#include "gaepoison/core/rng.hpp"

namespace gaepoison::attack {

inline ModelVector mp_baseline(const ModelVector& prev_global, double scale, std::uint64_t seed) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw config_error("MP scale must be a finite non-negative number");
  if (prev_global.size() == 0) throw contract_error("MP baseline of an empty model");
  auto rng = make_rng(seed, {stream::mp});
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector dir(prev_global.size());
  double norm = 0.0;
  while (norm == 0.0) {
    for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = normal(rng);
    norm = dir.norm();
  }
  return ModelVector(prev_global.values() + (scale / norm) * dir);
}

}  // namespace gaepoison::attack
