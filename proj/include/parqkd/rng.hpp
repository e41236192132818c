#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace parqkd {

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffULL;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline constexpr std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

/// Counter-based generator: the i-th output is a pure function of (key, i),
/// so any stage of a simulation can be replayed in isolation and streams for
/// distinct (seed, run, stage) triples never overlap.
class stream_rng {
public:
    using result_type = std::uint64_t;

    explicit stream_rng(std::uint64_t key) : key_(key), counter_(0) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~std::uint64_t{0}; }

    result_type operator()() { return detail::splitmix64(key_ ^ detail::splitmix64(counter_++)); }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

/// Derives the stream for a named stage of a named run.
inline stream_rng derive_rng(std::uint64_t master_seed, std::uint64_t run_index,
                             std::string_view stage) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = detail::fnv1a(h, master_seed);
    h = detail::fnv1a(h, run_index);
    h = detail::fnv1a(h, stage);
    return stream_rng(detail::splitmix64(h));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_double(stream_rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(stream_rng& rng, double p) { return uniform_double(rng) < p; }

/// Unbiased integer in [0, bound) by rejection.
inline std::uint64_t uniform_below(stream_rng& rng, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % bound;
}

/// Index draw from unnormalized nonnegative weights.
inline std::size_t sample_index(stream_rng& rng, const std::vector<double>& cumulative) {
    const double u = uniform_double(rng) * cumulative.back();
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (u < cumulative[mid]) hi = mid; else lo = mid + 1;
    }
    return lo;
}

/// Uniform m-subset of {items}, returned sorted. Partial Fisher-Yates.
inline std::vector<int> sample_subset(stream_rng& rng, std::vector<int> items, std::size_t m) {
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, items.size() - i));
        std::swap(items[i], items[j]);
    }
    items.resize(m);
    std::sort(items.begin(), items.end());
    return items;
}

} // namespace parqkd
