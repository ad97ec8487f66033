#pragma once

// Server-side screening: Euclidean distance thresholding and multi-Krum.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gaepoison/core/error.hpp"
#include "gaepoison/core/model_vector.hpp"
#include "gaepoison/fl/aggregate.hpp"
#include "gaepoison/fl/federation.hpp"

namespace gaepoison::defense {

struct ThresholdPolicy {
  enum class Kind { fixed, mean_plus_k_std } kind = Kind::mean_plus_k_std;
  double value = 2.0;  // tau for fixed, k otherwise

  static ThresholdPolicy fixed(double tau) { return {Kind::fixed, tau}; }
  static ThresholdPolicy mean_plus_k_std(double k) { return {Kind::mean_plus_k_std, k}; }

  /// Population mean and standard deviation of the distances.
  double threshold(std::span<const double> distances) const {
    if (kind == Kind::fixed) return value;
    const double n = static_cast<double>(distances.size());
    const double mean = std::accumulate(distances.begin(), distances.end(), 0.0) / n;
    double var = 0.0;
    for (double d : distances) var += (d - mean) * (d - mean);
    return mean + value * std::sqrt(var / n);
  }
};

struct DetectorEntry {
  std::size_t id = 0;
  double distance = 0.0;
  bool flagged = false;
};

struct DetectorReport {
  std::vector<DetectorEntry> entries;
  double threshold = 0.0;

  std::vector<bool> flags() const {
    std::vector<bool> out;
    for (const auto& e : entries) out.push_back(e.flagged);
    return out;
  }
};

inline DetectorReport distance_report(std::span<const ModelVector> models, const ModelVector& global,
                                      const ThresholdPolicy& policy) {
  if (models.empty()) throw contract_error("distance report over no models");
  DetectorReport r;
  std::vector<double> d;
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (models[i].size() != global.size())
      throw contract_error("model " + std::to_string(i) + " has a different dimension from the global model");
    d.push_back(euclidean_distance(models[i], global));
  }
  r.threshold = policy.threshold(d);
  for (std::size_t i = 0; i < models.size(); ++i) r.entries.push_back({i, d[i], d[i] > r.threshold});
  return r;
}

/// Krum score of every model: sum of its n - f - 2 smallest squared distances to the others.
inline std::vector<double> krum_scores(std::span<const ModelVector> models, std::size_t f) {
  const std::size_t n = models.size();
  if (n < f + 3) throw config_error("multi-Krum needs n >= f + 3 (n=" + std::to_string(n) + ", f=" + std::to_string(f) + ")");
  const std::size_t keep = n - f - 2;
  std::vector<double> scores(n);
  std::vector<double> row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) row.push_back((models[i].values() - models[j].values()).squaredNorm());
    std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(keep), row.end());
    scores[i] = std::accumulate(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(keep), 0.0);
  }
  return scores;
}

/// Indices of the m lowest-scoring models, ties toward the lowest index.
inline std::vector<std::size_t> multi_krum_selection(std::span<const ModelVector> models, std::size_t f, std::size_t m) {
  const auto scores = krum_scores(models, f);
  if (m < 1 || m > models.size()) throw config_error("multi-Krum m must lie in [1, n]");
  std::vector<std::size_t> order(models.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  order.resize(m);
  std::sort(order.begin(), order.end());
  return order;
}

inline ModelVector unweighted_mean(std::span<const ModelVector> models, const std::vector<std::size_t>& chosen) {
  // running mean, exact when the selected models coincide
  Vector acc = models[chosen.front()].values();
  for (std::size_t k = 1; k < chosen.size(); ++k)
    acc += (models[chosen[k]].values() - acc) / static_cast<double>(k + 1);
  return ModelVector(acc);
}

inline ModelVector multi_krum(std::span<const ModelVector> models, std::size_t f, std::size_t m) {
  return unweighted_mean(models, multi_krum_selection(models, f, m));
}

/// Distance detector. Report-only keeps plain FedAvg; exclusion drops flagged models and re-aggregates.
class DistanceDefense final : public fl::DefensePlugin {
 public:
  explicit DistanceDefense(ThresholdPolicy policy = {}, bool exclude = false) : policy_(policy), exclude_(exclude) {}

  std::string name() const override { return exclude_ ? "distance-exclude" : "distance"; }

  fl::DefenseOutcome aggregate(std::span<const ModelVector> models, std::span<const std::size_t> sizes) override {
    fl::DefenseOutcome out;
    out.global = fl::aggregate(models, sizes);
    const DetectorReport report = distance_report(models, out.global, policy_);
    out.flagged = report.flags();
    out.threshold = report.threshold;
    if (exclude_) {
      std::vector<ModelVector> kept;
      std::vector<std::size_t> kept_sizes;
      for (std::size_t i = 0; i < models.size(); ++i)
        if (!out.flagged[i]) {
          kept.push_back(models[i]);
          kept_sizes.push_back(sizes[i]);
        }
      if (!kept.empty()) out.global = fl::aggregate(kept, kept_sizes);
    }
    return out;
  }

 private:
  ThresholdPolicy policy_;
  bool exclude_;
};

/// Multi-Krum aggregation; models outside the selection are reported as flagged.
class KrumDefense final : public fl::DefensePlugin {
 public:
  KrumDefense(std::size_t f, std::size_t m) : f_(f), m_(m) {}

  std::string name() const override { return "multi_krum"; }

  fl::DefenseOutcome aggregate(std::span<const ModelVector> models, std::span<const std::size_t>) override {
    const auto chosen = multi_krum_selection(models, f_, m_);
    fl::DefenseOutcome out;
    out.global = unweighted_mean(models, chosen);
    out.flagged.assign(models.size(), true);
    for (auto i : chosen) out.flagged[i] = false;
    return out;
  }

 private:
  std::size_t f_;
  std::size_t m_;
};

}  // namespace gaepoison::defense
