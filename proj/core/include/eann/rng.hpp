#pragma once

#include <cstdint>
#include <random>

namespace eann {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to turn structured ids into well-spread seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(splitmix64(base) ^ stream);
}

// Stream for (seed, generation, index) triples; each slot of each generation
// gets an independent deterministic stream so work can be scheduled in any
// order without changing results.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

}  // namespace eann
