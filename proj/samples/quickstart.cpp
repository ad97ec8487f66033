// Clean run versus one GAE attacker on the bundled MNIST subset.
//   quickstart [data_root] [rounds]

#include <cstdio>
#include <string>

#include "gaepoison/gaepoison.hpp"

int main(int argc, char** argv) {
  using namespace gaepoison;
  cli::RunConfig cfg;
  if (argc > 1) cfg.data_root = argv[1];
  if (argc > 2) cfg.T_FL = std::stoi(argv[2]);
  const cli::Datasets data = cli::load_datasets(cfg);

  cfg.attack = "none";
  const auto clean = cli::simulate(cfg, data);
  cfg.attack = "gae";
  const auto attacked = cli::simulate(cfg, data);

  std::printf("round  clean_acc  attacked_acc  lambda  d_attacker  d_benign_max\n");
  for (std::size_t t = 0; t < clean.records.size(); ++t) {
    const auto& r = attacked.records[t];
    double benign_max = 0.0;
    for (std::size_t j = 0; j < r.n_benign(); ++j) benign_max = std::max(benign_max, r.distances[j]);
    std::printf("%5d  %9.4f  %12.4f  %6.3f  %10.5f  %12.5f\n", r.round, clean.records[t].global_accuracy,
                r.global_accuracy, r.lambda(), r.distances.back(), benign_max);
  }
  return 0;
}
