#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gaepoison/gaepoison.hpp"

namespace fixtures {

using namespace gaepoison;

inline Rng rng(std::uint64_t seed) { return make_rng(seed, {0xf1f1}); }

inline Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& g, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(g);
  return m;
}

inline ModelVector random_model(Eigen::Index dim, Rng& g, double lo = -1.0, double hi = 1.0) {
  return ModelVector(random_matrix(dim, 1, g, lo, hi).col(0));
}

inline Matrix random_symmetric(Eigen::Index n, Rng& g) {
  const Matrix m = random_matrix(n, n, g);
  return 0.5 * (m + m.transpose());
}

/// Benign-looking cluster: a shared centre plus small perturbations.
inline std::vector<ModelVector> clustered_models(std::size_t J, Eigen::Index dim, Rng& g, double spread = 0.1) {
  const Vector centre = random_matrix(dim, 1, g).col(0);
  std::vector<ModelVector> out;
  for (std::size_t j = 0; j < J; ++j) out.emplace_back(centre + spread * random_matrix(dim, 1, g).col(0));
  return out;
}

inline fl::Dataset make_dataset(const std::vector<std::vector<double>>& xs, const std::vector<int>& ys, int C) {
  fl::Dataset d;
  d.features.resize(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(xs.front().size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t k = 0; k < xs[i].size(); ++k) d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = xs[i][k];
  d.labels = ys;
  d.n_classes = C;
  return d;
}

inline fl::Dataset random_dataset(std::size_t n, Eigen::Index d, int C, Rng& g) {
  fl::Dataset out;
  out.features = random_matrix(static_cast<Eigen::Index>(n), d, g, 0.0, 1.0);
  std::uniform_int_distribution<int> lab(0, C - 1);
  for (std::size_t i = 0; i < n; ++i) out.labels.push_back(lab(g));
  out.n_classes = C;
  return out;
}

inline std::filesystem::path data_root() { return GAEPOISON_TEST_DATA; }

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("gaepoison_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixtures
