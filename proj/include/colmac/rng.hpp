#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace colmac {

using Rng = std::mt19937_64;

/// Independent stream keyed by a base seed and a path of integer labels.
///
/// Streams for different label paths are decorrelated through std::seed_seq,
/// so a worker can rebuild exactly the stream a sequential run would use.
inline Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * labels.size());
  words.push_back(static_cast<std::uint32_t>(seed));
  words.push_back(static_cast<std::uint32_t>(seed >> 32));
  for (auto label : labels) {
    words.push_back(static_cast<std::uint32_t>(label));
    words.push_back(static_cast<std::uint32_t>(label >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline int uniform_index(Rng& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

}  // namespace colmac
