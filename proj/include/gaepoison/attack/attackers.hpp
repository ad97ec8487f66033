#pragma once

// Attacker plugins for the federation loop.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "gaepoison/attack/gae.hpp"
#include "gaepoison/attack/mp.hpp"
#include "gaepoison/attack/objective.hpp"
#include "gaepoison/attack/trainer.hpp"
#include "gaepoison/core/rng.hpp"
#include "gaepoison/fl/federation.hpp"
#include "gaepoison/graph/signal.hpp"

namespace gaepoison::attack {

/// Rounded mean of the observed reported sizes, at least 1.
inline std::size_t mean_claimed_size(std::span<const std::size_t> sizes) {
  if (sizes.empty()) return 1;
  double total = 0.0;
  for (auto s : sizes) total += static_cast<double>(s);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(total / static_cast<double>(sizes.size()))));
}

/// Largest distance of an observed upload to the previous global model.
inline double max_benign_spread(std::span<const ModelVector> models, const ModelVector& prev_global) {
  double d = 0.0;
  for (const auto& m : models) d = std::max(d, euclidean_distance(m, prev_global));
  return d;
}

struct GaeAttackerConfig {
  GaeTrainConfig train;
  int hidden = 32;
  int embed = 16;
  double dropout = 0.1;
  ObjectiveMode mode = ObjectiveMode::surrogate;
  const fl::Dataset* probe_set = nullptr;
  double mu = 1.0;
  std::optional<double> d_T;  // unset: max observed benign distance to the previous global
  std::optional<std::size_t> claimed_size;  // unset: rounded mean of observed sizes
  double lambda0 = 1.0;
  double epsilon = 1.0;
  DualSign dual_sign = DualSign::standard;
  std::uint64_t seed = 1;
};

class GaeAttacker final : public fl::AttackerPlugin {
 public:
  explicit GaeAttacker(GaeAttackerConfig cfg, std::uint64_t instance = 0) : cfg_(std::move(cfg)), instance_(instance) {
    cfg_.train.validate();
    if (cfg_.hidden < 1 || cfg_.embed < 1) throw config_error("GAE layer sizes must be >= 1");
    if (!(cfg_.dropout >= 0.0 && cfg_.dropout < 1.0)) throw config_error("GAE dropout must lie in [0, 1)");
    if (cfg_.d_T && !(*cfg_.d_T >= 0.0)) throw config_error("d_T must be non-negative");
    if (cfg_.claimed_size && *cfg_.claimed_size == 0) throw config_error("D_a must be >= 1");
    if (!(cfg_.lambda0 >= 0.0) || !(cfg_.epsilon >= 0.0)) throw config_error("lambda0 and epsilon must be non-negative");
    dual_.lambda = cfg_.lambda0;
    dual_.epsilon = cfg_.epsilon;
  }

  std::string name() const override { return "gae"; }

  fl::AttackUpload craft(const fl::AttackObservation& obs) override {
    if (obs.benign_models.size() < 2) throw config_error("the GAE attacker needs at least two observed models");
    AttackContext ctx;
    ctx.observed_models.assign(obs.benign_models.begin(), obs.benign_models.end());
    ctx.observed_sizes.assign(obs.benign_sizes.begin(), obs.benign_sizes.end());
    ctx.prev_global = obs.prev_global;
    ctx.claimed_size = cfg_.claimed_size.value_or(mean_claimed_size(obs.benign_sizes));
    ctx.mode = cfg_.mode;
    ctx.probe_set = cfg_.probe_set;
    ctx.mu = cfg_.mu;
    ctx.validate();

    dual_.d_T = cfg_.d_T.value_or(max_benign_spread(obs.benign_models, obs.prev_global));
    const Matrix F = stack_rows(ctx.observed_models);
    const Matrix A = graph::cosine_adjacency(F).A;
    if (!initialised_) {
      auto rng = make_rng(cfg_.seed, {stream::gae_init, instance_});
      gae_ = GaeModel::init(F.cols(), cfg_.hidden, cfg_.embed, cfg_.dropout, rng);
      initialised_ = true;
    }
    const std::uint64_t round_seed =
        make_rng(cfg_.seed, {stream::attacker, instance_, static_cast<std::uint64_t>(obs.round)})();
    last_ = train_gae_round(gae_, A, F, dual_, ctx, cfg_.train, round_seed);
    dual_ = dual_update(dual_, last_.distance, cfg_.dual_sign);
    return {last_.malicious, ctx.claimed_size, dual_.lambda};
  }

  const DualState& dual() const { return dual_; }
  const GaeModel& model() const { return gae_; }
  const GaeRoundResult& last_round() const { return last_; }

 private:
  GaeAttackerConfig cfg_;
  std::uint64_t instance_;
  DualState dual_;
  GaeModel gae_;
  bool initialised_ = false;
  GaeRoundResult last_;
};

struct MpAttackerConfig {
  double scale = 3.0;
  bool relative = true;  // scale multiplies the max observed benign distance to the previous global
  std::optional<std::size_t> claimed_size;
  std::uint64_t seed = 1;
};

class MpAttacker final : public fl::AttackerPlugin {
 public:
  explicit MpAttacker(MpAttackerConfig cfg, std::uint64_t instance = 0) : cfg_(cfg), instance_(instance) {
    if (!(cfg_.scale > 0.0)) throw config_error("MP scale must be positive");
  }

  std::string name() const override { return "mp"; }

  fl::AttackUpload craft(const fl::AttackObservation& obs) override {
    const double radius = cfg_.relative ? cfg_.scale * max_benign_spread(obs.benign_models, obs.prev_global) : cfg_.scale;
    const std::uint64_t seed = make_rng(cfg_.seed, {stream::mp, instance_, static_cast<std::uint64_t>(obs.round)})();
    return {mp_baseline(obs.prev_global, radius, seed), cfg_.claimed_size.value_or(mean_claimed_size(obs.benign_sizes)),
            0.0};
  }

 private:
  MpAttackerConfig cfg_;
  std::uint64_t instance_;
};

}  // namespace gaepoison::attack
