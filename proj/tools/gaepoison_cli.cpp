#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaepoison/analysis/bound.hpp"
#include "gaepoison/cli/config.hpp"
#include "gaepoison/cli/scenario.hpp"

namespace {

using gaepoison::cli::RunConfig;

struct ConfigOptions {
  std::string file;
  std::map<std::string, std::string> values;
};

// Registers --config plus one flag per config key.
void add_config_options(CLI::App* app, ConfigOptions& opts) {
  app->add_option("--config", opts.file, "key=value config file ('#' comments); flags override it");
  for (const auto& k : gaepoison::cli::config_keys()) {
    std::string help = k.help;
    if (!k.choices.empty()) {
      help += " {";
      for (std::size_t i = 0; i < k.choices.size(); ++i) help += (i ? "|" : "") + k.choices[i];
      help += "}";
    }
    app->add_option("--" + k.name, opts.values[k.name], help)->default_str(gaepoison::cli::default_value(k));
  }
}

RunConfig resolve(CLI::App* app, const ConfigOptions& opts) {
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& k : gaepoison::cli::config_keys())
    if (app->count("--" + k.name) > 0) overrides.emplace_back(k.name, opts.values.at(k.name));
  return gaepoison::cli::parse_config(opts.file, overrides);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

void print_summary(const gaepoison::cli::RunSummary& s) { std::cout << s.to_json().dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GAE-based model-poisoning laboratory for federated linear SVMs.\n"
               "Dataset files are looked up under data_root, $" +
               std::string(gaepoison::cli::kDataRootEnv) + ", or ./data."};
  app.require_subcommand(1);

  ConfigOptions run_opts, sweep_j_opts, sweep_e_opts;
  auto* run = app.add_subcommand("run", "run one scenario and write metrics.csv, config.txt, summary.json");
  add_config_options(run, run_opts);

  std::string j_values = "5,10,15,20,25";
  auto* sweep_j = app.add_subcommand("sweep-j", "one run per benign-client count J");
  add_config_options(sweep_j, sweep_j_opts);
  sweep_j->add_option("--values", j_values, "comma-separated J values")->capture_default_str();

  std::string e_values = "3,5";
  auto* sweep_e = app.add_subcommand("sweep-eavesdrop", "one run per eavesdropped-client count");
  add_config_options(sweep_e, sweep_e_opts);
  sweep_e->add_option("--values", e_values, "comma-separated eavesdrop_count values")->capture_default_str();

  gaepoison::analysis::BoundParams bp;
  int t_max = 50;
  auto* bound = app.add_subcommand("bound", "print the convergence bound per round and the stabilised gap");
  bound->add_option("--Theta", bp.Theta, "initial optimality gap")->capture_default_str();
  bound->add_option("--rho", bp.rho, "PL constant")->capture_default_str();
  bound->add_option("--eta", bp.eta, "learning rate")->capture_default_str();
  bound->add_option("--L_c", bp.L_c, "Lipschitz constant")->capture_default_str();
  bound->add_option("--D", bp.D, "total data size")->capture_default_str();
  bound->add_option("--D_a", bp.D_a, "attacker's claimed size")->capture_default_str();
  bound->add_option("--F_max", bp.F_max, "maximum attacker loss")->capture_default_str();
  bound->add_option("--d_T", bp.d_T, "stealth radius")->capture_default_str();
  bound->add_option("--t", t_max, "last round printed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      print_summary(gaepoison::cli::run_scenario(resolve(run, run_opts)).summary);
    } else if (sweep_j->parsed()) {
      for (const auto& p : gaepoison::cli::run_sweep(resolve(sweep_j, sweep_j_opts), "J", split_list(j_values)))
        std::cout << "J=" << p.value << " final_global_accuracy=" << p.summary.final_global_accuracy << "\n";
    } else if (sweep_e->parsed()) {
      for (const auto& p :
           gaepoison::cli::run_sweep(resolve(sweep_e, sweep_e_opts), "eavesdrop_count", split_list(e_values)))
        std::cout << "eavesdrop_count=" << p.value << " final_global_accuracy=" << p.summary.final_global_accuracy
                  << "\n";
    } else if (bound->parsed()) {
      using namespace gaepoison::analysis;
      if (bound_is_vacuous(bp)) std::cerr << "warning: zeta=" << zeta(bp) << " is outside (0,1); the bound is vacuous\n";
      std::cout << "t,bound\n";
      for (int t = 0; t <= t_max; ++t) std::cout << t << "," << format_real(convergence_bound(bp, t)) << "\n";
      std::cout << "# zeta=" << format_real(zeta(bp)) << " limit=" << format_real(bound_limit(bp))
                << " stated_gap=" << format_real(asymptotic_gap(bp)) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
