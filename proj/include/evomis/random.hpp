#pragma once

#include <cstdint>
#include <random>

namespace evomis {

using Rng = std::mt19937_64;

// Derives a child seed so that independently seeded sub-generators
// (pool entries, population members, repetitions) are reproducible
// regardless of construction order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 step over master + index
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::size_t random_index(Rng& rng, std::size_t bound) {
    return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng);
}

inline double random_real(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline bool random_coin(Rng& rng) {
    return std::uniform_int_distribution<int>(0, 1)(rng) == 1;
}

} // namespace evomis
