#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gffmod {

using Rng = std::mt19937_64;

/// The splitmix64 finaliser.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed for a task identified by integer coordinates under a master seed.
/// Folding is order sensitive: derive_seed(s, {1, 2}) != derive_seed(s, {2, 1}).
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t c : coords) h = splitmix64(h ^ splitmix64(c + 0x632BE59BD9B4E019ull));
  return h;
}

inline Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> coords) {
  return make_rng(derive_seed(master, coords));
}

}  // namespace gffmod
