#pragma once

// Communication-round orchestration: local training of benign clients,
// attacker uploads, (robust) aggregation and broadcast.

#include <cstdint>
#include <future>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaepoison/core/error.hpp"
#include "gaepoison/core/model_vector.hpp"
#include "gaepoison/core/rng.hpp"
#include "gaepoison/fl/aggregate.hpp"
#include "gaepoison/fl/dataset.hpp"
#include "gaepoison/fl/partition.hpp"
#include "gaepoison/fl/svm.hpp"

namespace gaepoison::fl {

struct ClientState {
  std::size_t id = 0;
  DataShard shard;
  Dataset data;  // the shard's rows, owned by the client
  ModelVector model;
};

/// What an attacker sees in round t: the eavesdropped uploads and the last broadcast.
struct AttackObservation {
  int round = 0;
  std::span<const ModelVector> benign_models;
  std::span<const std::size_t> benign_sizes;
  const ModelVector& prev_global;
};

struct AttackUpload {
  ModelVector model;
  std::size_t claimed_size = 1;
  double lambda = 0.0;  // dual variable after this round's update (0 for attacks without one)
};

class AttackerPlugin {
 public:
  virtual ~AttackerPlugin() = default;
  virtual std::string name() const = 0;
  virtual AttackUpload craft(const AttackObservation& obs) = 0;
};

struct DefenseOutcome {
  ModelVector global;
  std::vector<bool> flagged;  // per participant, benign first then attackers
  double threshold = 0.0;
};

class DefensePlugin {
 public:
  virtual ~DefensePlugin() = default;
  virtual std::string name() const = 0;
  virtual DefenseOutcome aggregate(std::span<const ModelVector> models, std::span<const std::size_t> sizes) = 0;
};

struct FederationConfig {
  std::size_t n_clients = 5;
  int rounds = 50;
  LocalTrainConfig local;
  std::uint64_t seed = 1;
  std::size_t eavesdrop_count = 0;  // benign uploads each attacker observes; 0 = all
  unsigned threads = 1;             // parallel local training; results are order-independent
  bool evaluate_local_accuracy = true;

  void validate() const {
    if (n_clients < 1) throw config_error("federation needs J >= 1 clients");
    if (rounds < 1) throw config_error("federation needs T_FL >= 1 rounds");
    if (local.local_iterations < 0) throw config_error("T_L must be non-negative");
    if (!(local.eta >= 0.0)) throw config_error("eta must be non-negative");
    if (eavesdrop_count > n_clients) throw config_error("eavesdrop_count exceeds J");
  }
};

/// Snapshot of one communication round.
struct RoundRecord {
  int round = 0;
  std::vector<ModelVector> benign_models;
  std::vector<ModelVector> malicious_models;  // one per attacker; empty without attack
  ModelVector global_model;
  std::vector<double> lambdas;           // per attacker
  std::vector<double> distances;         // per participant to the new global, benign first
  std::vector<double> local_accuracies;  // per participant on the test set
  std::vector<bool> flagged;             // per participant; empty without a defense
  double threshold = 0.0;
  double global_accuracy = 0.0;
  double global_loss = 0.0;

  std::size_t n_benign() const { return benign_models.size(); }
  double lambda() const { return lambdas.empty() ? 0.0 : lambdas.front(); }
};

class Federation {
 public:
  Federation(const FederationConfig& cfg, const Dataset& train, const Dataset& test)
      : cfg_(cfg), train_(train), test_(test) {
    cfg_.validate();
    train_.validate();
    test_.validate();
    if (train_.n_features() != test_.n_features() || train_.n_classes != test_.n_classes)
      throw config_error("train and test sets disagree on features or classes");
    const auto shards = partition_iid(train_.size(), cfg_.n_clients, cfg_.seed);
    global_ = ModelVector::zeros(train_.model_shape());
    for (const auto& s : shards) {
      ClientState c;
      c.id = s.owner_id;
      c.shard = s;
      c.data = train_.select(s.rows);
      c.model = global_;
      clients_.push_back(std::move(c));
    }
  }

  const std::vector<ClientState>& clients() const { return clients_; }
  const ModelVector& global_model() const { return global_; }

  /// Runs all rounds. Plugins may be empty / null.
  std::vector<RoundRecord> run(std::span<const std::unique_ptr<AttackerPlugin>> attackers, DefensePlugin* defense) {
    std::vector<RoundRecord> records;
    records.reserve(static_cast<std::size_t>(cfg_.rounds));
    for (int t = 1; t <= cfg_.rounds; ++t) records.push_back(step(t, attackers, defense));
    return records;
  }

  RoundRecord step(int t, std::span<const std::unique_ptr<AttackerPlugin>> attackers, DefensePlugin* defense) {
    const ModelVector prev_global = global_;
    for (auto& c : clients_) c.model = prev_global;  // broadcast
    train_clients(t);

    RoundRecord rec;
    rec.round = t;
    std::vector<ModelVector> uploads;
    std::vector<std::size_t> sizes;
    for (const auto& c : clients_) {
      uploads.push_back(c.model);
      sizes.push_back(c.shard.reported_size);
    }
    rec.benign_models = uploads;

    const std::size_t seen = cfg_.eavesdrop_count == 0 ? clients_.size() : cfg_.eavesdrop_count;
    const std::vector<ModelVector> observed(uploads.begin(), uploads.begin() + static_cast<std::ptrdiff_t>(seen));
    const std::vector<std::size_t> observed_sizes(sizes.begin(), sizes.begin() + static_cast<std::ptrdiff_t>(seen));
    for (const auto& attacker : attackers) {
      const AttackObservation obs{t, observed, observed_sizes, prev_global};
      AttackUpload up = attacker->craft(obs);
      if (up.model.size() != prev_global.size())
        throw contract_error("attacker plugin '" + attacker->name() + "' emitted a model of dimension " +
                             std::to_string(up.model.size()) + ", expected " + std::to_string(prev_global.size()));
      if (!up.model.all_finite())
        throw numeric_error("attacker plugin '" + attacker->name() + "' emitted non-finite values");
      if (up.claimed_size == 0) throw contract_error("attacker plugin '" + attacker->name() + "' claimed zero data");
      rec.malicious_models.push_back(up.model);
      rec.lambdas.push_back(up.lambda);
      uploads.push_back(std::move(up.model));
      sizes.push_back(up.claimed_size);
    }

    if (defense != nullptr) {
      DefenseOutcome out = defense->aggregate(uploads, sizes);
      if (out.global.size() != prev_global.size())
        throw contract_error("defense plugin '" + defense->name() + "' produced a model of the wrong dimension");
      global_ = std::move(out.global);
      rec.flagged = std::move(out.flagged);
      rec.threshold = out.threshold;
    } else {
      global_ = fl::aggregate(uploads, sizes);
    }
    if (!global_.all_finite()) throw numeric_error("aggregated global model is not finite in round " + std::to_string(t));

    rec.global_model = global_;
    for (const auto& m : uploads) {
      rec.distances.push_back(euclidean_distance(m, global_));
      if (cfg_.evaluate_local_accuracy) rec.local_accuracies.push_back(evaluate_accuracy(m, test_));
    }
    rec.global_accuracy = evaluate_accuracy(global_, test_);
    rec.global_loss = svm_loss(global_, train_, cfg_.local.mu);
    return rec;
  }

 private:
  void train_clients(int t) {
    auto train_one = [&](ClientState& c) {
      auto rng = make_rng(cfg_.seed, {stream::local_train, static_cast<std::uint64_t>(t), c.id});
      c.model = local_train(c.data, c.model, cfg_.local, rng);
    };
    if (cfg_.threads <= 1 || clients_.size() == 1) {
      for (auto& c : clients_) train_one(c);
      return;
    }
    for (std::size_t begin = 0; begin < clients_.size(); begin += cfg_.threads) {
      std::vector<std::future<void>> jobs;
      for (std::size_t j = begin; j < std::min(clients_.size(), begin + cfg_.threads); ++j)
        jobs.push_back(std::async(std::launch::async, train_one, std::ref(clients_[j])));
      for (auto& f : jobs) f.get();
    }
  }

  FederationConfig cfg_;
  Dataset train_;
  Dataset test_;
  std::vector<ClientState> clients_;
  ModelVector global_;
};

inline std::vector<RoundRecord> run_federation(const FederationConfig& cfg, const Dataset& train, const Dataset& test,
                                               std::span<const std::unique_ptr<AttackerPlugin>> attackers = {},
                                               DefensePlugin* defense = nullptr) {
  Federation fed(cfg, train, test);
  return fed.run(attackers, defense);
}

}  // namespace gaepoison::fl
