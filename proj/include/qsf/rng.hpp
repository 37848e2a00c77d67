#pragma once

#include <cstdint>
#include <random>

namespace qsf {

// Seeded 64-bit stream. Substreams are keyed by (seed, stream id) so that
// work split into fixed chunks draws the same numbers regardless of how the
// chunks are scheduled.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next() { return engine_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal();

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// Derives an independent seed from a parent seed and a list of keys.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key_a, std::uint64_t key_b = 0,
                          std::uint64_t key_c = 0);

}  // namespace qsf
