#pragma once

#include <cmath>
#include <cstdint>

namespace semiflex {

// Counter-based RNG: every variate is a pure function of (seed, stream, index),
// so ensembles are reproducible independent of thread count or evaluation order.

inline uint64_t splitmix_fin(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline uint64_t counter_u64(uint64_t seed, uint64_t stream, uint64_t index) {
    uint64_t z = splitmix_fin(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
    return splitmix_fin(z + 0x9E3779B97F4A7C15ULL * (index + 1));
}

// Uniform on (0,1), never exactly 0 or 1.
inline double counter_uniform(uint64_t seed, uint64_t stream, uint64_t index) {
    return (static_cast<double>(counter_u64(seed, stream, index) >> 11) + 0.5) *
           0x1.0p-53;
}

struct NormalPair {
    double first, second;
};

// Box-Muller pair built from indices (2p, 2p+1) of the uniform counter stream.
inline NormalPair counter_normal_pair(uint64_t seed, uint64_t stream, uint64_t p) {
    const double u1 = counter_uniform(seed, stream, 2 * p);
    const double u2 = counter_uniform(seed, stream, 2 * p + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

// Random access to the i-th standard normal of a stream.
inline double counter_normal(uint64_t seed, uint64_t stream, uint64_t i) {
    const NormalPair np = counter_normal_pair(seed, stream, i / 2);
    return (i % 2 == 0) ? np.first : np.second;
}

} // namespace semiflex
