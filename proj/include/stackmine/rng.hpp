#pragma once

// Self-contained deterministic RNG primitives. std::<random> distributions
// are implementation-defined across standard libraries, so every stochastic
// stage (UMAP SGD, k-means++, fixtures) draws from these instead.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace stackmine {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t splitmix_of(std::uint64_t x) {
    std::uint64_t s = x;
    return splitmix64(s);
}

class Pcg32 {
public:
    explicit Pcg32(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t s = seed;
        state_ = splitmix64(s);
        inc_ = (splitmix64(s) + 2 * stream) | 1ULL;
        next_u32();
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        auto xorshifted = static_cast<std::uint32_t>(((old >> 18) ^ old) >> 27);
        auto rot = static_cast<std::uint32_t>(old >> 59);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // unbiased integer in [0, bound)
    std::uint32_t next_below(std::uint32_t bound) {
        if (bound <= 1) return 0;
        std::uint32_t threshold = (0u - bound) % bound;
        for (;;) {
            std::uint32_t r = next_u32();
            if (r >= threshold) return r % bound;
        }
    }

    // uniform double in [0, 1) with 53-bit resolution
    double next_double() {
        std::uint64_t hi = next_u32();
        std::uint64_t lo = next_u32();
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }

    // standard normal, Box-Muller
    double next_normal() {
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = next_below(static_cast<std::uint32_t>(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 1;
};

}  // namespace stackmine
