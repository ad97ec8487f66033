#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace gaepoison {

using Rng = std::mt19937_64;

/// Independent generator for a (seed, stream...) tuple, e.g. (seed, round, client).
inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {}) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (stream.size() + 1));
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto s : stream) push(s);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

// Stream tags keep seeds of unrelated consumers apart.
namespace stream {
inline constexpr std::uint64_t partition = 0x70a1;
inline constexpr std::uint64_t local_train = 0x7a1b;
inline constexpr std::uint64_t gae_init = 0x6ae0;
inline constexpr std::uint64_t gae_epoch = 0x6ae1;
inline constexpr std::uint64_t mp = 0x3b00;
inline constexpr std::uint64_t attacker = 0xa77a;
}  // namespace stream

}  // namespace gaepoison
