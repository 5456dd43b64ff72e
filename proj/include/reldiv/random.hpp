// File: include/reldiv/random.hpp
#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "reldiv/error.hpp"

namespace reldiv {

/// One mixing step of the splitmix64 generator (Steele, Lea, Flood 2014).
/// Used only to derive well-separated seeds, never as the main stream.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// FNV-1a over the label bytes, so textual experiment labels map to seeds.
inline std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derives the sub-seed for (master seed, experiment label, run index).
/// Adding runs or experiments never perturbs seeds derived earlier.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                 std::uint64_t index) {
    std::uint64_t state = master ^ hash_label(label);
    std::uint64_t a = splitmix64(state);
    state ^= index;
    std::uint64_t b = splitmix64(state);
    return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

/// Deterministic random stream: a std::mt19937_64 engine (whose output
/// sequence is fixed by the C++ standard) with hand-rolled, unbiased
/// integer/real draws so results reproduce bit-for-bit on any platform.
/// std::uniform_int_distribution is deliberately avoided; its mapping is
/// implementation-defined.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Unbiased draw from {0, 1, ..., n-1} by rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw ArgumentError("SeededRng::below: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do {
            r = next_u64();
        } while (r >= limit);
        return r % n;
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    bool chance(double probability) { return unit() < probability; }

    /// Fisher-Yates shuffle driven by below(), not std::shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
        }
    }

    /// m distinct indices drawn uniformly from {0, ..., n-1}, in draw order
    /// (partial Fisher-Yates).
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t m) {
        if (m > n) throw ArgumentError("SeededRng::sample_indices: m exceeds n");
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t j = i + static_cast<std::size_t>(below(n - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(m);
        return pool;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace reldiv
