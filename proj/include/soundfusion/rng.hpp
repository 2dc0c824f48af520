// Copyright (C) 2026 the soundfusion authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace soundfusion {

// Counter-based generator: draw k is a pure function of (seed, k), so any
// draw can be replayed without regenerating its predecessors and results
// are bit-identical across platforms (no distribution from <random>).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    // splitmix64 of the draw index, keyed by seed.
    std::uint64_t bits(std::uint64_t index) const {
        std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ull * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t next_bits() { return bits(counter_++); }

    // Uniform in (0, 1]; never returns 0 so log() below is safe.
    double next_uniform() {
        return (static_cast<double>(next_bits() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Box-Muller; one value per call, the sine partner is discarded to keep
    // the draw-index -> value mapping stateless.
    double next_gaussian() {
        const double u = next_uniform();
        const double v = next_uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
    }

    std::vector<double> gaussian_vector(std::size_t n) {
        std::vector<double> out(n);
        for (auto& x : out) x = next_gaussian();
        return out;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t counter_ = 0;
};

// Derives an independent stream for (seed, stream_id) so trajectories and
// per-step noise draws never overlap.
inline CounterRng stream_rng(std::uint64_t seed, std::uint64_t stream_id) {
    CounterRng mix(seed ^ 0x6a09e667f3bcc909ull);
    return CounterRng(mix.bits(stream_id));
}

} // namespace soundfusion
