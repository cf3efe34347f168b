#ifndef SPDSIM_RNG_HPP
#define SPDSIM_RNG_HPP

#include <cmath>
#include <cstdint>

#include "error.hpp"

namespace spd {

/// SplitMix64 finalizer (Stafford mix13). Bijective on 64-bit words, used
/// both for seeding the main generator and for deriving per-stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// i-th output of the SplitMix64 sequence started at `master`. Injective in
/// `index` for a fixed master (odd increment, bijective finalizer), so
/// parallel workers seeded with consecutive indices never collide.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

/// xoshiro256++ (Blackman & Vigna), seeded through SplitMix64. 256-bit
/// state, period 2^256 - 1. One instance per logical stream; instances may
/// be moved between threads but never shared.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) : seed_(seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x += 0x9E3779B97F4A7C15ULL;
            word = mix64(x);
        }
    }

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform real in (0,1]. The open lower end keeps log(u) finite; 1.0 is
    /// reachable (maps to 0 in the exponential transform).
    double uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Exponential variate with the given mean, via inversion.
    double exponential(double mean_ns) {
        if (!(mean_ns > 0.0))
            throw_invalid("exponential: mean must be positive");
        return exp_transform(uniform(), mean_ns);
    }

    /// Inversion transform used by exponential(); split out so the u->dt
    /// mapping is testable at the endpoints.
    static double exp_transform(double u, double mean_ns) {
        return -mean_ns * std::log(u);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4]{};
    std::uint64_t seed_ = 0;
};

} // namespace spd

#endif
