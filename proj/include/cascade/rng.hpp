#pragma once

#include <cstdint>

namespace cascade {

/// SplitMix64 (Steele, Lea, Flood 2014). Small, counter-based and
/// splittable: every (seed, stream) pair yields an independent sequence, so
/// Monte Carlo instances can be replayed or parallelized without any shared
/// generator state.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    /// Sub-stream derived from (seed, stream) by one scrambling round.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t stream_index) {
        SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ULL * (stream_index + 1)));
        g.next();
        return g;
    }

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

}  // namespace cascade
