#pragma once

#include <cmath>
#include <cstdint>

namespace gridev {

// splitmix64; used both as a sequential stream and as a stateless hash so
// per-entity draws are independent of iteration order.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1), 53-bit resolution
    double uniform01() { return (next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        // inclusive bounds; modulo bias is irrelevant at our ranges
        return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double normal() {
        // Box-Muller; deterministic, no cached spare
        double u1 = uniform01(), u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    double lognormal(double median, double sigma) {
        return median * std::exp(sigma * normal());
    }
};

inline std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b) {
    SplitMix64 s(a * 0x9e3779b97f4a7c15ull + b + 0x632be59bd9b4e019ull);
    return s.next();
}

// one stable uniform per (seed, stream, id); stream separates draw purposes
inline double hash_uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t id) {
    return (hash_mix(hash_mix(seed, stream), id) >> 11) * 0x1.0p-53;
}

} // namespace gridev
