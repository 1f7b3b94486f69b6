#pragma once

#include <cstdint>
#include <random>

namespace usast {

// splitmix64 step; used to derive independent per-worker seeds from one
// user-facing seed so parallel stages stay deterministic.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(mix_seed(seed) ^ stream);
}

using Rng = std::mt19937_64;

}  // namespace usast
