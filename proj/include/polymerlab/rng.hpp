#pragma once

#include <cmath>
#include <cstdint>

namespace polymer {

// SplitMix64 finalizer; also the mixing stage of the counter-based cell
// generator. Full 64-bit avalanche per application.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic bits for lattice cell (i, x) under a master seed. Evaluation
// order independent, so parallel fills and sub-rectangle regeneration agree.
inline std::uint64_t cell_bits(std::uint64_t seed, std::int64_t i, std::int64_t x) {
    std::uint64_t h = splitmix64(seed ^ 0x243f6a8885a308d3ULL);
    h = splitmix64(h ^ static_cast<std::uint64_t>(i));
    h = splitmix64(h ^ static_cast<std::uint64_t>(x));
    return h;
}

// Derive an independent stream seed (replica workers, sub-experiments).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    return splitmix64(seed ^ splitmix64(salt + 0x632be59bd9b4e019ULL));
}

// Map bits to (0,1), both endpoints excluded.
inline double unit_open(std::uint64_t h) {
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse standard normal CDF, Wichura's AS241 (PPND16), ~1e-15 relative.
double normal_quantile(double p);

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0x1.6a09e667f3bcdp-1); }

}  // namespace polymer
