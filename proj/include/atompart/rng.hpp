#pragma once

#include <cstdint>
#include <random>

namespace atompart {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Independent engine for a (seed, stream) pair. Streams let one master seed
// drive many replicates, and separate sub-streams within a replicate.
inline std::mt19937_64 make_engine(std::uint64_t master_seed, std::uint64_t stream) {
  std::uint64_t s = master_seed ^ (0xD1B54A32D192ED03ull * (stream + 1));
  std::uint32_t init[8];
  for (int i = 0; i < 4; ++i) {
    std::uint64_t w = splitmix64_next(s);
    init[2 * i] = static_cast<std::uint32_t>(w);
    init[2 * i + 1] = static_cast<std::uint32_t>(w >> 32);
  }
  std::seed_seq seq(init, init + 8);
  return std::mt19937_64(seq);
}

// Uniform in [0,1) with 53 random bits; pinned here because the std
// distributions are not bit-stable across standard library implementations.
inline double next_unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

// Uniform integer in [0, bound) by bitmask rejection.
inline std::uint64_t next_below(std::mt19937_64& g, std::uint64_t bound) {
  std::uint64_t mask = bound - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  mask |= mask >> 32;
  std::uint64_t x;
  do {
    x = g() & mask;
  } while (x >= bound);
  return x;
}

// Per-path randomness. The seating stream and the dish stream are separate
// so the latent seating sequence is identical across base measures sharing
// a master seed; dish draws always consume exactly two values from `dish`.
struct PathRng {
  std::mt19937_64 crp;
  std::mt19937_64 dish;
  std::uint64_t fresh_counter = 0;

  PathRng(std::uint64_t master_seed, std::uint64_t path_index)
      : crp(make_engine(master_seed, 2 * path_index)),
        dish(make_engine(master_seed, 2 * path_index + 1)) {}
};

}  // namespace atompart
