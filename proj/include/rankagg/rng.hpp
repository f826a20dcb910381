#pragma once

// Pinned pseudorandom source. splitmix64 is small, seedable and splittable,
// and its output sequence is fully specified by the seed, so generated
// streams reproduce across platforms and implementations. std:: distributions
// are avoided for the same reason: their mapping from engine output to values
// is implementation-defined.

#include <cassert>
#include <cstdint>

namespace rankagg {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Unbiased draw from [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        assert(bound > 0);
        const std::uint64_t reject = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= reject) return r % bound;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    SplitMix64 split() { return SplitMix64(next()); }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

}  // namespace rankagg
