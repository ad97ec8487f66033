#pragma once

// Run configuration: key=value files with '#' comments, command-line overrides,
// and a canonical snapshot that reproduces a run.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gaepoison/analysis/metrics.hpp"
#include "gaepoison/core/error.hpp"

namespace gaepoison::cli {

inline constexpr const char* kDataRootEnv = "GAEPOISON_DATA_ROOT";

struct RunConfig {
  // data
  std::string dataset = "mnist";
  std::string data_root;  // empty: $GAEPOISON_DATA_ROOT, then ./data
  std::size_t train_size = 2000;
  std::size_t test_size = 1000;
  // federation
  std::size_t J = 5;
  int T_L = 10;
  int T_FL = 50;
  double eta = 0.01;
  double mu = 0.01;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // attack
  std::string attack = "none";
  std::size_t attackers = 1;
  std::size_t eavesdrop_count = 0;
  int gae_epochs = 20;
  double gae_lr = 0.01;
  int gae_probes = 4;
  double gae_radius = 1e-3;
  int gae_hidden = 32;
  int gae_embed = 16;
  double gae_dropout = 0.1;
  std::string objective = "surrogate";
  std::size_t probe_size = 200;
  std::string edge_targets = "clamp";
  std::string laplacian = "degree";
  std::string d_T = "adaptive";
  std::string D_a = "mean";
  double lambda0 = 1.0;
  double dual_epsilon = 1.0;
  std::string dual_sign = "standard";
  double mp_scale = 3.0;
  bool mp_relative = true;
  // defense
  std::string defense = "distance";
  bool defense_exclude = false;
  std::string threshold = "mean_plus_k_std";
  double threshold_k = 2.0;
  double threshold_tau = 1.0;
  std::size_t krum_f = 1;
  std::size_t krum_m = 1;
  // output
  std::string output_dir = "out";

  std::filesystem::path resolved_data_root() const {
    if (!data_root.empty()) return data_root;
    if (const char* env = std::getenv(kDataRootEnv); env != nullptr && *env != '\0') return env;
    return "data";
  }
};

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& text) {
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) throw config_error("cannot parse '" + text + "'");
  return v;
}

inline bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw config_error("cannot parse '" + text + "' as a boolean");
}

template <class T>
std::string show(const T& v) {
  if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_floating_point_v<T>) {
    return analysis::format_real(v);
  } else {
    return std::to_string(v);
  }
}

}  // namespace config_detail

struct KeySpec {
  std::string name;
  std::string help;
  std::vector<std::string> choices;  // empty: free-form
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

namespace config_detail {

template <class T>
KeySpec key(std::string name, T RunConfig::*field, std::string help, std::vector<std::string> choices = {}) {
  KeySpec k;
  k.name = std::move(name);
  k.help = std::move(help);
  k.choices = choices;
  k.set = [field, choices, n = k.name](RunConfig& c, const std::string& text) {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!choices.empty() && std::find(choices.begin(), choices.end(), text) == choices.end()) {
        std::string all;
        for (const auto& ch : choices) all += (all.empty() ? "" : "|") + ch;
        throw config_error("'" + text + "' is not one of " + all);
      }
      c.*field = text;
    } else if constexpr (std::is_same_v<T, bool>) {
      c.*field = parse_bool(text);
    } else {
      c.*field = parse_number<T>(text);
    }
  };
  k.get = [field](const RunConfig& c) { return show(c.*field); };
  return k;
}

}  // namespace config_detail

/// Every accepted key, in snapshot order.
inline const std::vector<KeySpec>& config_keys() {
  using config_detail::key;
  using C = RunConfig;
  static const std::vector<KeySpec> keys = {
      key("dataset", &C::dataset, "dataset family", {"mnist", "fashionmnist", "cifar10"}),
      key("data_root", &C::data_root, "dataset directory; empty uses $GAEPOISON_DATA_ROOT, then ./data"),
      key("train_size", &C::train_size, "training samples kept (0 = all)"),
      key("test_size", &C::test_size, "test samples kept (0 = all)"),
      key("J", &C::J, "number of benign clients"),
      key("T_L", &C::T_L, "local iterations per round"),
      key("T_FL", &C::T_FL, "communication rounds"),
      key("eta", &C::eta, "local learning rate"),
      key("mu", &C::mu, "weight of the 1/2 ||w||^2 regulariser"),
      key("batch_size", &C::batch_size, "local mini-batch size (0 = full batch)"),
      key("seed", &C::seed, "master seed"),
      key("threads", &C::threads, "parallel local-training workers"),
      key("attack", &C::attack, "attacker type", {"none", "gae", "mp"}),
      key("attackers", &C::attackers, "number of attacker instances"),
      key("eavesdrop_count", &C::eavesdrop_count, "benign uploads each attacker observes (0 = all J)"),
      key("gae_epochs", &C::gae_epochs, "GAE training epochs per round"),
      key("gae_lr", &C::gae_lr, "GAE Adam learning rate"),
      key("gae_probes", &C::gae_probes, "simultaneous-perturbation probes per epoch"),
      key("gae_radius", &C::gae_radius, "perturbation radius"),
      key("gae_hidden", &C::gae_hidden, "GCN hidden width"),
      key("gae_embed", &C::gae_embed, "GCN embedding width"),
      key("gae_dropout", &C::gae_dropout, "dropout between GCN layers during training"),
      key("objective", &C::objective, "attack loss term", {"surrogate", "oracle"}),
      key("probe_size", &C::probe_size, "oracle probe samples, taken from the head of the test set"),
      key("edge_targets", &C::edge_targets, "Bernoulli targets from cosines", {"clamp", "shift"}),
      key("laplacian", &C::laplacian, "Laplacian diagonal", {"degree", "elementwise"}),
      key("d_T", &C::d_T, "stealth radius: 'adaptive' or a number"),
      key("D_a", &C::D_a, "attacker's claimed size: 'mean' or an integer"),
      key("lambda0", &C::lambda0, "initial dual variable"),
      key("dual_epsilon", &C::dual_epsilon, "dual step size"),
      key("dual_sign", &C::dual_sign, "dual update direction", {"standard", "literal"}),
      key("mp_scale", &C::mp_scale, "MP offset (multiple of the benign spread when mp_relative)"),
      key("mp_relative", &C::mp_relative, "scale MP offset by the max benign distance to the previous global"),
      key("defense", &C::defense, "server-side defense", {"none", "distance", "multi_krum"}),
      key("defense_exclude", &C::defense_exclude, "drop models flagged by the distance detector"),
      key("threshold", &C::threshold, "distance threshold policy", {"mean_plus_k_std", "fixed"}),
      key("threshold_k", &C::threshold_k, "k of mean_plus_k_std"),
      key("threshold_tau", &C::threshold_tau, "fixed threshold"),
      key("krum_f", &C::krum_f, "multi-Krum tolerated byzantine count"),
      key("krum_m", &C::krum_m, "multi-Krum models averaged"),
      key("output_dir", &C::output_dir, "artifact directory"),
  };
  return keys;
}

inline const KeySpec* find_key(std::string_view name) {
  for (const auto& k : config_keys())
    if (k.name == name) return &k;
  return nullptr;
}

inline std::string default_value(const KeySpec& k) { return k.get(RunConfig{}); }

/// Checks cross-field invariants. `where` maps keys to the place they were set.
inline void validate_config(const RunConfig& c, const std::map<std::string, std::string>& where = {}) {
  auto fail = [&](const std::string& k, const std::string& why) {
    const auto it = where.find(k);
    throw config_error((it == where.end() ? std::string("config") : it->second) + ": " + k + ": " + why);
  };
  if (c.J < 1) fail("J", "invariant J >= 1 violated");
  if (c.T_L < 1) fail("T_L", "invariant T_L >= 1 violated");
  if (c.T_FL < 1) fail("T_FL", "invariant T_FL >= 1 violated");
  if (!(c.eta > 0.0)) fail("eta", "must be positive");
  if (!(c.mu >= 0.0)) fail("mu", "must be non-negative");
  if (c.eavesdrop_count > c.J) fail("eavesdrop_count", "invariant eavesdrop_count <= J violated");
  if (c.threads < 1) fail("threads", "must be >= 1");
  if (c.attack != "none" && c.attackers < 1) fail("attackers", "must be >= 1 when an attack is set");
  if (c.attack == "gae" && (c.eavesdrop_count == 0 ? c.J : c.eavesdrop_count) < 2)
    fail(c.eavesdrop_count == 0 ? "J" : "eavesdrop_count", "the GAE attacker needs at least two observed models");
  if (c.gae_epochs < 1) fail("gae_epochs", "must be >= 1");
  if (!(c.gae_lr >= 0.0)) fail("gae_lr", "must be non-negative");
  if (c.gae_probes < 1) fail("gae_probes", "must be >= 1");
  if (!(c.gae_radius > 0.0)) fail("gae_radius", "must be positive");
  if (c.gae_hidden < 1) fail("gae_hidden", "must be >= 1");
  if (c.gae_embed < 1) fail("gae_embed", "must be >= 1");
  if (!(c.gae_dropout >= 0.0 && c.gae_dropout < 1.0)) fail("gae_dropout", "must lie in [0, 1)");
  if (c.objective == "oracle" && c.probe_size < 1) fail("probe_size", "oracle mode needs probe samples");
  if (c.d_T != "adaptive") {
    double v = 0.0;
    try {
      v = config_detail::parse_number<double>(c.d_T);
    } catch (const config_error&) {
      fail("d_T", "expected 'adaptive' or a number");
    }
    if (!(v >= 0.0)) fail("d_T", "must be non-negative");
  }
  if (c.D_a != "mean") {
    std::size_t v = 0;
    try {
      v = config_detail::parse_number<std::size_t>(c.D_a);
    } catch (const config_error&) {
      fail("D_a", "expected 'mean' or an integer");
    }
    if (v < 1) fail("D_a", "must be >= 1");
  }
  if (!(c.lambda0 >= 0.0)) fail("lambda0", "must be non-negative");
  if (!(c.dual_epsilon >= 0.0)) fail("dual_epsilon", "must be non-negative");
  if (!(c.mp_scale > 0.0)) fail("mp_scale", "must be positive");
  if (c.defense == "multi_krum") {
    const std::size_t n = c.J + (c.attack == "none" ? 0 : c.attackers);
    if (n < c.krum_f + 3) fail("krum_f", "multi-Krum needs J + attackers >= krum_f + 3");
    if (c.krum_m < 1 || c.krum_m > n) fail("krum_m", "must lie in [1, J + attackers]");
  }
  if (c.output_dir.empty()) fail("output_dir", "must not be empty");
}

/// Applies one key=value assignment; `where` names its origin in errors.
inline void apply_setting(RunConfig& c, const std::string& k, const std::string& v, const std::string& where) {
  const KeySpec* spec = find_key(k);
  if (spec == nullptr) throw config_error(where + ": unknown key '" + k + "'");
  try {
    spec->set(c, v);
  } catch (const config_error& e) {
    throw config_error(where + ": " + k + ": " + e.what());
  }
}

/// Reads `file_path` (may be empty), then applies `overrides` in order, then validates.
inline RunConfig parse_config(const std::filesystem::path& file_path,
                              const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  RunConfig c;
  std::map<std::string, std::string> where;
  if (!file_path.empty()) {
    std::ifstream f(file_path);
    if (!f) throw config_error("cannot open config file " + file_path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      const std::string loc = file_path.string() + ":" + std::to_string(lineno);
      const auto hash = line.find('#');
      const std::string body = config_detail::trim(std::string_view(line).substr(0, hash));
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw config_error(loc + ": expected key=value");
      const std::string k = config_detail::trim(std::string_view(body).substr(0, eq));
      const std::string v = config_detail::trim(std::string_view(body).substr(eq + 1));
      apply_setting(c, k, v, loc);
      where[k] = loc;
    }
  }
  for (const auto& [k, v] : overrides) {
    apply_setting(c, k, v, "--" + k);
    where[k] = "--" + k;
  }
  validate_config(c, where);
  return c;
}

/// Canonical key=value text; parsing it back yields the same configuration.
inline std::string snapshot(const RunConfig& c) {
  std::string out;
  for (const auto& k : config_keys()) out += k.name + "=" + k.get(c) + "\n";
  return out;
}

}  // namespace gaepoison::cli
