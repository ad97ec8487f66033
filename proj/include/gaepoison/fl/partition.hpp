#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "gaepoison/core/error.hpp"
#include "gaepoison/core/rng.hpp"

namespace gaepoison::fl {

/// Rows of the federation's training set owned by one client.
struct DataShard {
  std::size_t owner_id = 0;
  std::vector<std::size_t> rows;
  std::size_t reported_size = 0;  // D_j, the size announced to the server
};

/// Disjoint near-equal IID split of `n_samples` rows over `n_clients` owners.
/// The first n % J shards receive one extra row.
inline std::vector<DataShard> partition_iid(std::size_t n_samples, std::size_t n_clients, std::uint64_t seed) {
  if (n_clients == 0) throw config_error("partition needs at least one client");
  if (n_clients > n_samples)
    throw config_error("cannot split " + std::to_string(n_samples) + " samples over " +
                       std::to_string(n_clients) + " clients");
  std::vector<std::size_t> order(n_samples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = make_rng(seed, {stream::partition});
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<DataShard> shards(n_clients);
  const std::size_t base = n_samples / n_clients;
  const std::size_t extra = n_samples % n_clients;
  auto it = order.begin();
  for (std::size_t j = 0; j < n_clients; ++j) {
    const std::size_t len = base + (j < extra ? 1 : 0);
    shards[j].owner_id = j;
    shards[j].rows.assign(it, it + static_cast<std::ptrdiff_t>(len));
    shards[j].reported_size = len;
    it += static_cast<std::ptrdiff_t>(len);
  }
  return shards;
}

}  // namespace gaepoison::fl
