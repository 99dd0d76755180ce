#pragma once

#include <cstdint>
#include <random>

namespace zddb {

using Rng = std::mt19937_64;

// Uniform double in [0,1) built from the top 53 bits of the generator.
// std::uniform_real_distribution is implementation-defined, which would break
// the byte-identical-output contract across toolchains.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(double theta, Rng& rng) {
    return uniform01(rng) < theta;
}

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent named stream from a root seed. Streams are keyed by
// (trial, role) so trials can run in parallel yet stay reproducible.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t trial, std::uint64_t role) {
    return splitmix64(splitmix64(splitmix64(root) ^ trial) ^ (role * 0x100000001b3ULL));
}

}  // namespace zddb
