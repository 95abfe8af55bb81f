#pragma once

#include <cstdint>
#include <random>

namespace topiclite::rng {

using Engine = std::mt19937_64;

// splitmix64 finalizer; used to derive independent per-item seeds from a base
// seed without correlated streams.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for item `index` of stream `tag` under `base`. Deterministic and
// order-free, so parallel workers can seed themselves independently.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag,
                                 std::uint64_t index) {
  return mix64(base ^ mix64(tag ^ mix64(index)));
}

// Uniform integer in [0, n). Plain modulo: the sequence is part of the
// documented sampling procedure, so it must stay replayable.
inline std::uint64_t bounded(Engine& eng, std::uint64_t n) {
  return eng() % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double unit(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace topiclite::rng
