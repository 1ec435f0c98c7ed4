#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace augcl {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent sub-seeds from a master
// seed and a list of integer tags (epoch, batch, graph index, ...).
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = mix_seed(base);
  for (std::uint64_t t : tags) s = mix_seed(s ^ mix_seed(t + 0x632be59bd9b4e019ULL));
  return s;
}

// Stream tags for derive_seed, so that distinct phases never share randomness.
enum class SeedStream : std::uint64_t {
  kEncoderInit = 1,
  kEpochShuffle,
  kAugmentation,
  kFrozenBatches,
  kMiningViews,
  kPartition,
  kEstimator,
  kFolds,
  kSynthetic,
};

inline std::uint64_t derive_seed(std::uint64_t base, SeedStream stream,
                                 std::initializer_list<std::uint64_t> tags = {}) {
  std::uint64_t s = mix_seed(base ^ mix_seed(static_cast<std::uint64_t>(stream)));
  for (std::uint64_t t : tags) s = mix_seed(s ^ mix_seed(t + 0x632be59bd9b4e019ULL));
  return s;
}

}  // namespace augcl
