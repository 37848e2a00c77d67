#include "qsf/rng.hpp"

namespace qsf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(make_engine(seed, stream)) {}

double Rng::normal() { return normal_(engine_); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key_a, std::uint64_t key_b,
                          std::uint64_t key_c) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ key_a);
    h = splitmix64(h ^ (key_b + 0x632be59bd9b4e019ULL));
    h = splitmix64(h ^ (key_c + 0x85157af5d2c2a8b1ULL));
    return h;
}

}  // namespace qsf
