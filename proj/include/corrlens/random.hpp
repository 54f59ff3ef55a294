#pragma once

// Seeded randomness with a fully specified output sequence.
//
// std::shuffle and the std distributions are implementation-defined, so every
// randomized stage goes through these helpers to keep outputs byte-identical
// across standard libraries for a given seed.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace corrlens {

using Rng = std::mt19937_64;

// Uniform integer in [0, bound). bound must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    // Rejection sampling over the largest multiple of bound.
    const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % bound);
    std::uint64_t draw = rng();
    while (draw >= limit) draw = rng();
    return draw % bound;
}

// Uniform real in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a(std::string_view bytes,
                              std::uint64_t hash = 0xcbf29ce484222325ULL) noexcept {
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

// Derives an independent stream seed for a named sub-task.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept {
    std::uint64_t z = fnv1a(label) ^ (seed + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace corrlens
