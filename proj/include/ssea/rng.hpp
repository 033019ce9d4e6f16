#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

#include "genotype.hpp"

namespace ssea {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Deterministic pseudo-random stream (xoshiro256**, seeded through
/// SplitMix64). The raw 64-bit draw sequence depends only on the seed, so
/// identical seeds replay identical runs on every platform.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_)
            word = detail::splitmix64(sm);
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Unbiased draw from [0, bound) via Lemire rejection. A bound of 0 or 1
    /// returns 0 without consuming a draw, so degenerate choices (e.g. a
    /// one-element population) leave the stream untouched.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound <= 1)
            return 0;
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool next_bool() { return next_u64() >> 63; }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double next_unit_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
    std::uint64_t seed_ = 0;
};

/// Seed for the sub-stream `index` of `base`. This is the documented mixing
/// function used everywhere runs, cells or instances need independent
/// streams: the index-th output of the SplitMix64 sequence seeded at `base`.
inline std::uint64_t derive_stream_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t s = base + 0x9E3779B97F4A7C15ULL * index;
    return detail::splitmix64(s);
}

/// FNV-1a over a label, used to fold textual cell identifiers into seeds.
inline std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Gap before the next success in a Bernoulli(p) sequence (0-based); used to
/// jump between flipped bits in standard bit mutation.
inline std::uint64_t geometric_gap(RngStream& rng, double p) {
    if (p >= 1.0)
        return 0;
    const double g = std::floor(std::log(rng.next_unit_open()) / std::log1p(-p));
    if (g >= 9.2e18)
        return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(g);
}

/// Number of Bernoulli(q) trials up to and including the first success
/// (>= 1). Saturates to uint64 max when the sampled count overflows, which
/// callers treat as "longer than any representable run".
inline std::uint64_t geometric_trials(RngStream& rng, double q) {
    if (q >= 1.0)
        return 1;
    if (q <= 0.0)
        return std::numeric_limits<std::uint64_t>::max();
    const double g = std::floor(std::log(rng.next_unit_open()) / std::log1p(-q));
    if (g >= 9.2e18)
        return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(g) + 1;
}

/// Uniform random genotype: each bit is 1 with probability 1/2,
/// independently.
inline Genotype random_genotype(std::uint32_t n, RngStream& rng) {
    if (n == 0)
        throw std::invalid_argument("random_genotype: dimension must be positive");
    Genotype g(n);
    for (auto& w : g.words())
        w = rng.next_u64();
    g.mask_top();
    return g;
}

} // namespace ssea
