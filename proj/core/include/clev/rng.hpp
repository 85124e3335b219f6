#pragma once

#include <cstdint>
#include <initializer_list>

#include "clev/normal.hpp"

namespace clev {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// xoshiro256++ with substreams derived by hashing a (seed, path...) tuple
// through SplitMix64.  Substreams for distinct paths are statistically
// independent, which keeps parallel replicates reproducible regardless of
// scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) { reseed(seed); }

    // Deterministic substream for e.g. (seed, replicate, family).
    static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
        std::uint64_t s = seed;
        for (std::uint64_t id : path) {
            s = detail::splitmix64(s) ^ (id * 0xD6E8FEB86659FD93ULL);
        }
        return Rng(s);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0,1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1); safe to feed through the normal quantile.
    double next_open_double() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal by inversion: one uniform per deviate, so every draw
    // consumes a fixed amount of the stream.
    double next_normal() { return norm_quantile(next_open_double()); }

    bool next_bernoulli(double p) { return next_double() < p; }

private:
    void reseed(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = detail::splitmix64(s);
        // All-zero state is the one forbidden point for xoshiro.
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t state_[4];
};

}  // namespace clev
