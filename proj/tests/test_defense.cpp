#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace gaepoison;
using namespace gaepoison::defense;
using namespace fixtures;

namespace {

ModelVector mv2(double a, double b) {
  Vector v(2);
  v << a, b;
  return ModelVector(v);
}

/// Score of model i by enumerating every subset of n - f - 2 neighbours and keeping the cheapest.
double enumerated_score(const std::vector<ModelVector>& ms, std::size_t i, std::size_t f) {
  const std::size_t n = ms.size(), keep = n - f - 2;
  std::vector<std::size_t> others;
  for (std::size_t j = 0; j < n; ++j)
    if (j != i) others.push_back(j);
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << others.size()); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != keep) continue;
    double s = 0;
    for (std::size_t k = 0; k < others.size(); ++k)
      if (mask & (1u << k)) s += (ms[i].values() - ms[others[k]].values()).squaredNorm();
    best = std::min(best, s);
  }
  return best;
}

}  // namespace

TEST(DistanceReport, AllAtGlobal) {
  auto g = rng(61);
  const ModelVector w = random_model(5, g);
  const std::vector<ModelVector> ms(4, w);
  for (double tau : {1e-9, 1.0}) {
    const auto r = distance_report(ms, w, ThresholdPolicy::fixed(tau));
    for (const auto& e : r.entries) {
      EXPECT_EQ(e.distance, 0.0);
      EXPECT_FALSE(e.flagged);
    }
  }
}

TEST(DistanceReport, ThreeFourFive) {
  const std::vector<ModelVector> ms{mv2(0, 0), mv2(3, 4)};
  const auto r = distance_report(ms, mv2(0, 0), ThresholdPolicy::fixed(4));
  EXPECT_EQ(r.entries[0].distance, 0.0);
  EXPECT_EQ(r.entries[1].distance, 5.0);
  EXPECT_FALSE(r.entries[0].flagged);
  EXPECT_TRUE(r.entries[1].flagged);
  EXPECT_EQ(r.threshold, 4.0);
}

TEST(DistanceReport, MeanPlusKStdMatchesOracle) {
  auto g = rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ModelVector> ms;
    for (int j = 0; j < 6; ++j) ms.push_back(random_model(8, g, -3, 3));
    const ModelVector global = random_model(8, g);
    std::vector<double> d;
    for (const auto& m : ms) d.push_back(std::sqrt((m.values() - global.values()).array().square().sum()));
    double mean = 0;
    for (double x : d) mean += x;
    mean /= 6;
    double var = 0;
    for (double x : d) var += (x - mean) * (x - mean);
    const double thr = mean + 2 * std::sqrt(var / 6);
    const auto r = distance_report(ms, global, ThresholdPolicy::mean_plus_k_std(2));
    EXPECT_NEAR(r.threshold, thr, 1e-12);
    for (std::size_t i = 0; i < 6; ++i) {
      EXPECT_NEAR(r.entries[i].distance, d[i], 1e-12);
      EXPECT_EQ(r.entries[i].flagged, d[i] > thr);
    }
  }
}

TEST(DistanceReport, PermutationEquivariant) {
  auto g = rng(63);
  std::vector<ModelVector> ms;
  for (int j = 0; j < 7; ++j) ms.push_back(random_model(5, g));
  const ModelVector global = random_model(5, g);
  std::vector<std::size_t> perm{3, 0, 6, 1, 5, 2, 4};
  std::vector<ModelVector> permuted;
  for (auto p : perm) permuted.push_back(ms[p]);
  const auto a = distance_report(ms, global, {});
  const auto b = distance_report(permuted, global, {});
  EXPECT_NEAR(a.threshold, b.threshold, 1e-12);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    EXPECT_EQ(b.entries[i].distance, a.entries[perm[i]].distance);
    EXPECT_EQ(b.entries[i].flagged, a.entries[perm[i]].flagged);
  }
}

TEST(DistanceReport, DimensionMismatch) {
  const std::vector<ModelVector> ms{mv2(0, 0)};
  EXPECT_THROW(distance_report(ms, ModelVector(Vector::Zero(3)), {}), contract_error);
  EXPECT_THROW(distance_report(std::vector<ModelVector>{}, mv2(0, 0), {}), contract_error);
}

TEST(MultiKrum, IdenticalModels) {
  auto g = rng(64);
  const ModelVector w = random_model(6, g);
  EXPECT_EQ(multi_krum(std::vector<ModelVector>(5, w), 1, 3), w);
}

TEST(MultiKrum, OutlierNeverSelected) {
  const std::vector<ModelVector> ms{mv2(0.1, 0), mv2(0, 0.1), mv2(-0.1, 0), mv2(0, -0.1), mv2(100, 0)};
  const auto scores = krum_scores(ms, 1);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(scores[i], enumerated_score(ms, i, 1), 1e-12);
  for (std::size_t m = 1; m <= 4; ++m) {
    const auto sel = multi_krum_selection(ms, 1, m);
    EXPECT_EQ(std::count(sel.begin(), sel.end(), 4u), 0);
  }
}

TEST(MultiKrum, TooFewModels) {
  const std::vector<ModelVector> ms{mv2(0, 0), mv2(1, 1), mv2(2, 2)};
  EXPECT_THROW(multi_krum(ms, 1, 1), config_error);
  EXPECT_NO_THROW(multi_krum(ms, 0, 1));
}

TEST(MultiKrum, ExhaustiveEnumerationSmallFixtures) {
  auto g = rng(65);
  for (std::size_t n = 3; n <= 7; ++n) {
    for (std::size_t f = 0; f + 3 <= n; ++f) {
      for (int trial = 0; trial < 5; ++trial) {
        std::vector<ModelVector> ms;
        for (std::size_t j = 0; j < n; ++j) ms.push_back(random_model(3, g));
        std::vector<double> oracle;
        for (std::size_t i = 0; i < n; ++i) oracle.push_back(enumerated_score(ms, i, f));
        const auto scores = krum_scores(ms, f);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(scores[i], oracle[i], 1e-12);
        for (std::size_t m = 1; m <= n; ++m) {
          std::vector<std::size_t> idx(n);
          std::iota(idx.begin(), idx.end(), 0);
          std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return oracle[a] < oracle[b]; });
          Vector mean = Vector::Zero(3);
          for (std::size_t k = 0; k < m; ++k) mean += ms[idx[k]].values();
          mean /= static_cast<double>(m);
          EXPECT_LT((multi_krum(ms, f, m).values() - mean).cwiseAbs().maxCoeff(), 1e-12);
        }
      }
    }
  }
}

TEST(MultiKrum, OrderInvariantUpToTies) {
  auto g = rng(66);
  std::vector<ModelVector> ms;
  for (int j = 0; j < 6; ++j) ms.push_back(random_model(4, g));
  std::vector<ModelVector> rev(ms.rbegin(), ms.rend());
  EXPECT_LT((multi_krum(ms, 1, 3).values() - multi_krum(rev, 1, 3).values()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MultiKrum, TiesGoToLowestIndex) {
  const std::vector<ModelVector> ms{mv2(1, 0), mv2(0, 1), mv2(-1, 0), mv2(0, -1)};
  EXPECT_EQ(multi_krum_selection(ms, 0, 1), std::vector<std::size_t>{0});
  EXPECT_EQ(multi_krum(ms, 0, 1), ms[0]);
}

TEST(DistanceDefense, ReportOnlyKeepsFedAvgAndExclusionDrops) {
  const std::vector<ModelVector> ms{mv2(0, 0), mv2(0.1, 0), mv2(0, 0.1), mv2(-0.1, 0), mv2(0, -0.1), mv2(50, 50)};
  const std::vector<std::size_t> sizes(6, 10);
  DistanceDefense report({}, false), exclude({}, true);
  const auto a = report.aggregate(ms, sizes);
  EXPECT_EQ(a.global, fl::aggregate(ms, sizes));
  EXPECT_TRUE(a.flagged[5]);
  EXPECT_EQ(std::count(a.flagged.begin(), a.flagged.end(), true), 1);
  const auto b = exclude.aggregate(ms, sizes);
  const std::vector<ModelVector> kept(ms.begin(), ms.begin() + 5);
  const std::vector<std::size_t> kept_sizes(5, 10);
  EXPECT_EQ(b.global, fl::aggregate(kept, kept_sizes));
}

TEST(KrumDefense, FlagsUnselected) {
  const std::vector<ModelVector> ms{mv2(0.1, 0), mv2(0, 0.1), mv2(-0.1, 0), mv2(0, -0.1), mv2(100, 0)};
  KrumDefense k(1, 3);
  const auto out = k.aggregate(ms, std::vector<std::size_t>(5, 1));
  EXPECT_TRUE(out.flagged[4]);
  EXPECT_EQ(std::count(out.flagged.begin(), out.flagged.end(), false), 3);
}
