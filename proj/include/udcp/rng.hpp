#pragma once

#include <cstdint>

namespace udcp::rng {

// Counter-based pseudo-random generator.
//
// Output k (k = 0, 1, ...) of the stream with seed s is
//
//     at(s, k) = mix64(s + (k+1) * 0x9E3779B97F4A7C15)
//
// where mix64 is the splitmix64 finalizer, so at(s, 0), at(s, 1), ... is
// exactly the splitmix64 sequence started from state s. Random access by
// counter makes every sampling routine reproducible and parallelizable:
// sample j of a batch uses sub-seed derive(seed, j) regardless of how the
// batch is split over threads.
//
// Test vectors (seed = 0): e220a8397b1dcdaf, 6e789e6aa1b965f4,
// 06c45d188009454f.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t counter) {
    return mix64(seed + (counter + 1) * kGolden);
}

// Independent sub-stream seed, e.g. per sample index or per worker.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) { return at(seed, stream); }

// Uniform double in [0, 1) from 53 high bits.
inline double unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

struct Stream {
    std::uint64_t seed;
    std::uint64_t ctr = 0;
    std::uint64_t next() { return at(seed, ctr++); }
    double next_unit() { return unit(next()); }
    // Uniform in [0, bound) by rejection-free multiply-shift; bias is
    // negligible for the desk-scale bounds used here (< 2^40).
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
    }
};

}  // namespace udcp::rng
