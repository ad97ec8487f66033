#pragma once

// Builds federations from a RunConfig, runs them and writes the artifacts:
// metrics.csv, config.txt (snapshot) and summary.json.

#include <algorithm>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaepoison/analysis/metrics.hpp"
#include "gaepoison/attack/attackers.hpp"
#include "gaepoison/cli/config.hpp"
#include "gaepoison/defense/detection.hpp"
#include "gaepoison/fl/federation.hpp"
#include "gaepoison/fl/idx.hpp"

namespace gaepoison::cli {

struct Datasets {
  fl::Dataset train;
  fl::Dataset test;
};

inline Datasets load_datasets(const RunConfig& c) {
  const auto root = c.resolved_data_root();
  auto require_file = [](const std::filesystem::path& p) {
    if (!std::filesystem::exists(p)) throw io_error("dataset file not found: " + p.string());
    return p;
  };
  Datasets d;
  if (c.dataset == "cifar10") {
    const auto dir = root / "cifar-10-batches-bin";
    std::vector<std::filesystem::path> batches;
    for (int b = 1; b <= 5; ++b) batches.push_back(require_file(dir / ("data_batch_" + std::to_string(b) + ".bin")));
    d.train = fl::load_cifar10(batches);
    d.test = fl::load_cifar10({require_file(dir / "test_batch.bin")});
  } else {
    const auto dir = root / (c.dataset == "mnist" ? "mnist" : "fashion-mnist");
    d.train = fl::load_idx_dataset(require_file(dir / "train-images-idx3-ubyte"),
                                   require_file(dir / "train-labels-idx1-ubyte"));
    d.test = fl::load_idx_dataset(require_file(dir / "t10k-images-idx3-ubyte"),
                                  require_file(dir / "t10k-labels-idx1-ubyte"));
  }
  d.train = d.train.head(c.train_size);
  d.test = d.test.head(c.test_size);
  return d;
}

inline fl::FederationConfig federation_config(const RunConfig& c) {
  fl::FederationConfig f;
  f.n_clients = c.J;
  f.rounds = c.T_FL;
  f.local.local_iterations = c.T_L;
  f.local.eta = c.eta;
  f.local.mu = c.mu;
  f.local.batch_size = c.batch_size;
  f.seed = c.seed;
  f.eavesdrop_count = c.eavesdrop_count;
  f.threads = c.threads;
  return f;
}

/// Attacker instances for the configured attack; `probe` backs oracle mode.
inline std::vector<std::unique_ptr<fl::AttackerPlugin>> make_attackers(const RunConfig& c, const fl::Dataset* probe) {
  std::vector<std::unique_ptr<fl::AttackerPlugin>> out;
  if (c.attack == "none") return out;
  std::optional<std::size_t> claimed;
  if (c.D_a != "mean") claimed = config_detail::parse_number<std::size_t>(c.D_a);
  for (std::size_t a = 0; a < c.attackers; ++a) {
    if (c.attack == "gae") {
      attack::GaeAttackerConfig g;
      g.train.epochs = c.gae_epochs;
      g.train.lr = c.gae_lr;
      g.train.probes = c.gae_probes;
      g.train.radius = c.gae_radius;
      g.train.targets = c.edge_targets == "shift" ? attack::EdgeTargets::shift : attack::EdgeTargets::clamp;
      g.train.laplacian = c.laplacian == "elementwise" ? graph::LaplacianKind::elementwise : graph::LaplacianKind::degree;
      g.hidden = c.gae_hidden;
      g.embed = c.gae_embed;
      g.dropout = c.gae_dropout;
      g.mode = c.objective == "oracle" ? attack::ObjectiveMode::oracle : attack::ObjectiveMode::surrogate;
      g.probe_set = probe;
      g.mu = c.mu;
      if (c.d_T != "adaptive") g.d_T = config_detail::parse_number<double>(c.d_T);
      g.claimed_size = claimed;
      g.lambda0 = c.lambda0;
      g.epsilon = c.dual_epsilon;
      g.dual_sign = c.dual_sign == "literal" ? attack::DualSign::literal : attack::DualSign::standard;
      g.seed = c.seed;
      out.push_back(std::make_unique<attack::GaeAttacker>(g, a));
    } else {
      attack::MpAttackerConfig m;
      m.scale = c.mp_scale;
      m.relative = c.mp_relative;
      m.claimed_size = claimed;
      m.seed = c.seed;
      out.push_back(std::make_unique<attack::MpAttacker>(m, a));
    }
  }
  return out;
}

inline std::unique_ptr<fl::DefensePlugin> make_defense(const RunConfig& c) {
  if (c.defense == "distance") {
    const auto policy = c.threshold == "fixed" ? defense::ThresholdPolicy::fixed(c.threshold_tau)
                                               : defense::ThresholdPolicy::mean_plus_k_std(c.threshold_k);
    return std::make_unique<defense::DistanceDefense>(policy, c.defense_exclude);
  }
  if (c.defense == "multi_krum") return std::make_unique<defense::KrumDefense>(c.krum_f, c.krum_m);
  return nullptr;
}

struct RunSummary {
  double final_global_accuracy = 0.0;
  double final_global_loss = 0.0;
  int rounds = 0;
  double mean_attacker_distance_rank = 0.0;  // 1 = closest to the global model
  int attacker_rounds_flagged = 0;            // rounds where any attacker was flagged
  int attacker_rounds_within_benign = 0;      // rounds where every attacker is no farther than the farthest benign
  int benign_flags = 0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["final_global_accuracy"] = final_global_accuracy;
    j["final_global_loss"] = final_global_loss;
    j["rounds"] = rounds;
    j["mean_attacker_distance_rank"] = mean_attacker_distance_rank;
    j["attacker_rounds_flagged"] = attacker_rounds_flagged;
    j["attacker_rounds_within_benign"] = attacker_rounds_within_benign;
    j["benign_flags"] = benign_flags;
    return j;
  }
};

inline RunSummary summarize(const std::vector<fl::RoundRecord>& records) {
  RunSummary s;
  if (records.empty()) return s;
  s.final_global_accuracy = records.back().global_accuracy;
  s.final_global_loss = records.back().global_loss;
  s.rounds = static_cast<int>(records.size());
  double rank_sum = 0.0;
  int rank_count = 0;
  for (const auto& r : records) {
    const std::size_t J = r.n_benign();
    const double benign_max = *std::max_element(r.distances.begin(), r.distances.begin() + static_cast<std::ptrdiff_t>(J));
    bool any_flagged = false, all_within = true;
    for (std::size_t i = 0; i < r.distances.size(); ++i) {
      const bool flagged = i < r.flagged.size() && r.flagged[i];
      if (i < J) {
        s.benign_flags += flagged;
        continue;
      }
      any_flagged = any_flagged || flagged;
      all_within = all_within && r.distances[i] <= benign_max;
      rank_sum += 1.0 + static_cast<double>(std::count_if(r.distances.begin(), r.distances.end(),
                                                          [&](double d) { return d < r.distances[i]; }));
      ++rank_count;
    }
    if (!r.malicious_models.empty()) {
      s.attacker_rounds_flagged += any_flagged;
      s.attacker_rounds_within_benign += all_within;
    }
  }
  s.mean_attacker_distance_rank = rank_count > 0 ? rank_sum / rank_count : 0.0;
  return s;
}

struct ScenarioResult {
  std::vector<fl::RoundRecord> records;
  RunSummary summary;
};

/// Runs the federation described by `c` on already loaded data, without writing anything.
inline ScenarioResult simulate(const RunConfig& c, const Datasets& data) {
  validate_config(c);
  const fl::Dataset probe = data.test.head(c.probe_size);
  auto attackers = make_attackers(c, c.objective == "oracle" ? &probe : nullptr);
  auto defense = make_defense(c);
  ScenarioResult out;
  out.records = fl::run_federation(federation_config(c), data.train, data.test, attackers, defense.get());
  out.summary = summarize(out.records);
  return out;
}

inline ScenarioResult run_scenario(const RunConfig& c, const Datasets& data) {
  ScenarioResult out = simulate(c, data);
  const std::filesystem::path dir = c.output_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io_error("cannot create " + dir.string() + ": " + ec.message());
  analysis::emit_metrics(out.records, dir / "metrics.csv");
  analysis::write_text_file(dir / "config.txt", snapshot(c));
  analysis::write_text_file(dir / "summary.json", out.summary.to_json().dump(2) + "\n");
  return out;
}

inline ScenarioResult run_scenario(const RunConfig& c) { return run_scenario(c, load_datasets(c)); }

struct SweepPoint {
  std::string value;
  RunSummary summary;
};

/// One run per value of `key`, each into output_dir/<key>_<value>; writes output_dir/sweep.csv.
inline std::vector<SweepPoint> run_sweep(const RunConfig& base, const std::string& key,
                                         const std::vector<std::string>& values) {
  if (values.empty()) throw config_error("sweep over no values");
  const Datasets data = load_datasets(base);
  std::vector<SweepPoint> points;
  std::string csv = key + ",final_global_accuracy,mean_attacker_distance_rank,attacker_rounds_flagged\n";
  for (const auto& v : values) {
    RunConfig c = base;
    apply_setting(c, key, v, "sweep");
    c.output_dir = (std::filesystem::path(base.output_dir) / (key + "_" + v)).string();
    validate_config(c);
    const auto res = run_scenario(c, data);
    points.push_back({v, res.summary});
    csv += v + "," + analysis::format_real(res.summary.final_global_accuracy) + "," +
           analysis::format_real(res.summary.mean_attacker_distance_rank) + "," +
           std::to_string(res.summary.attacker_rounds_flagged) + "\n";
  }
  std::filesystem::create_directories(base.output_dir);
  analysis::write_text_file(std::filesystem::path(base.output_dir) / "sweep.csv", csv);
  return points;
}

}  // namespace gaepoison::cli
