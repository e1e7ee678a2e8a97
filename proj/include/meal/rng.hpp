#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace meal {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Child stream derived from a root seed and a stream label. All randomness in
// the project flows through these forks so that every consumer gets an
// independent, reproducible stream (e.g. fork_stream(seed, "init-pool"),
// fork_stream(seed, "kmeanspp-step-3")).
inline std::mt19937_64 fork_stream(uint64_t seed, std::string_view label) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return std::mt19937_64(splitmix64(seed ^ splitmix64(h)));
}

// Derived integer seed for APIs that take a seed rather than a stream.
inline uint64_t fork_seed(uint64_t seed, std::string_view label) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(seed ^ splitmix64(h));
}

// Uniform double in [0, 1) with 53-bit resolution. We roll our own tiny
// distributions because the std:: ones are not bit-identical across standard
// library implementations, and reproducibility is part of the contract.
inline double uniform_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_real(rng);
}

// Unbiased uniform integer in [0, n). n must be >= 1.
inline uint64_t uniform_index(std::mt19937_64& rng, uint64_t n) {
    const uint64_t limit = ~uint64_t{0} - ~uint64_t{0} % n;
    uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % n;
}

// Standard normal deviate (Box-Muller, cosine branch only).
inline double normal(std::mt19937_64& rng) {
    double u1 = uniform_real(rng);
    while (u1 <= 0.0) u1 = uniform_real(rng);
    const double u2 = uniform_real(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace meal
