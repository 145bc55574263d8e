#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace asymspec {

// xoshiro256++ seeded through splitmix64. Self-contained so that a given
// seed produces the same draw sequence on every platform and toolchain;
// std::* distributions make no such promise and would break byte-identical
// artifact reproduction.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    // Disjoint substream: hashes (seed, stream_id) into a fresh seed.
    // Bootstrap iterations, panel pairs, etc. each get their own stream so
    // results do not depend on evaluation order.
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t x = seed;
        std::uint64_t a = splitmix64(x);
        std::uint64_t y = stream_id + 0x9e3779b97f4a7c15ULL;
        std::uint64_t b = splitmix64(y);
        return Rng(a ^ (b + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
    }

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

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the paired draw is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Unbiased integer in [0, n) (Lemire's multiply-shift rejection).
    std::size_t below(std::size_t n) {
        std::uint64_t range = static_cast<std::uint64_t>(n);
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * range;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < range) {
            std::uint64_t threshold = (0ULL - range) % range;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * range;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::size_t>(m >> 64);
    }

    // Fisher-Yates permutation of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        for (std::size_t i = n; i > 1; --i) {
            std::size_t j = below(i);
            std::swap(p[i - 1], p[j]);
        }
        return p;
    }

    // k distinct indices from 0..n-1, returned ascending so that a full
    // draw (k == n) is the identity selection.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        std::vector<std::size_t> p = permutation(n);
        p.resize(k);
        std::sort(p.begin(), p.end());
        return p;
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4] = {};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace asymspec
