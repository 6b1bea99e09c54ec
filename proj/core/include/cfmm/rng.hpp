// Seeded RNG streams for the Monte Carlo engine.
//
// Reproducibility contract: trajectory i always draws from the stream
// mix_seed(master_seed, i), so results are bit-identical across runs and
// thread counts. Uniforms take the top 53 bits of the mt19937_64 output
// (the engine's sequence is fully specified by the standard) and normals go
// through the inverse-CDF transform, never through std::normal_distribution,
// whose output is implementation-defined.
#pragma once

#include <cstdint>
#include <random>

#include "cfmm/gbm_risk.hpp"

namespace cfmm {

// splitmix64 finalizer.
inline std::uint64_t mix_bits(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Per-trajectory stream seed: splitmix64 over master + (index+1) * golden.
inline std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t index) {
    return mix_bits(master_seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : eng_(seed) {}

    // Uniform on the open interval (0,1).
    double uniform() {
        const std::uint64_t bits = eng_() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via inverse CDF.
    double normal() { return inverse_normal_cdf(uniform()); }

private:
    std::mt19937_64 eng_;
};

}  // namespace cfmm
