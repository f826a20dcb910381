#pragma once

// Single-slot reservoir over the ranking stream: after m offers the held
// sample is any of the m rankings with probability 1/m.

#include <optional>

#include "rankagg/core.hpp"
#include "rankagg/rng.hpp"

namespace rankagg {

class Reservoir {
public:
    explicit Reservoir(std::uint64_t seed) : rng_(seed) {}

    void offer(const Ranking& pi) {
        if (sample_ && !sample_->same_universe(pi))
            fail(Errc::UniverseMismatch, "offered ranking belongs to a different universe");
        seen_ += 1;
        const std::uint64_t pick = rng_.below(static_cast<std::uint64_t>(seen_)) + 1;
        if (pick == static_cast<std::uint64_t>(seen_)) sample_ = pi;
    }

    const std::optional<Ranking>& sample() const { return sample_; }
    std::int64_t seen() const { return seen_; }

    std::uint64_t rng_state() const { return rng_.state(); }

    void restore(std::optional<Ranking> sample, std::int64_t seen, std::uint64_t rng_state) {
        sample_ = std::move(sample);
        seen_ = seen;
        rng_ = SplitMix64(rng_state);
    }

private:
    std::optional<Ranking> sample_;
    std::int64_t seen_ = 0;
    SplitMix64 rng_;
};

}  // namespace rankagg
