#pragma once

#include <cstdint>
#include <random>

namespace sketchreg {

using Rng = std::mt19937_64;

/// Independent random streams drawn from one user seed. Every randomized
/// step of a solver pulls its seed from here, so a run is reproducible from
/// the seed alone and tests can regenerate any single stream.
enum class SeedStream : std::uint64_t {
  sketch = 1,
  hadamard_signs = 2,
  sampling = 3,
  variance_probe = 4,
  power_iteration = 5,
  fresh_sketch = 6,
  retry = 7,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream, std::uint64_t index = 0) {
  return splitmix64(splitmix64(seed ^ (static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL)) + index);
}

}  // namespace sketchreg
