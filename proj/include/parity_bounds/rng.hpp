// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <utility>

namespace parity_bounds {

// Counter-based uniform generator: every variate is a pure function of
// (seed, counter), so batches are reproducible and can be split across
// threads by row range without shared state. Row k consumes counters
// 2k (U) and 2k+1 (V).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    // SplitMix64 finalizer applied to the keyed counter stream.
    [[nodiscard]] std::uint64_t bits(std::uint64_t counter) const {
        std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0,1): (k + 1/2) * 2^-53 never hits 0 or 1.
    [[nodiscard]] double uniform(std::uint64_t counter) const {
        return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    [[nodiscard]] std::pair<double, double> row_uniforms(std::uint64_t row) const {
        return {uniform(2 * row), uniform(2 * row + 1)};
    }

    [[nodiscard]] std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

}  // namespace parity_bounds
