#pragma once

#include <cstdint>
#include <random>

namespace yule {

/// SplitMix64 finalizer (Steele, Lea & Flood). Bijective avalanche on 64 bits.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Child seed for stream `index` under `parent`.
///
/// Seeds form a tree: a Monte Carlo run derives replication r's seed as
/// derive_seed(master, r), and each path of a pair uses
/// derive_seed(replication_seed, path) with path in {1, 2}. The mix is a pure
/// function of its arguments, so results never depend on which worker ran a
/// replication or in what order.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::uint64_t index) noexcept {
  return splitmix64(splitmix64(parent) ^ splitmix64(~index));
}

/// Generator used for all Gaussian noise in the library.
using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine{seed}; }

}  // namespace yule
