#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "subalign/error.hpp"

namespace subalign::quantum {

enum class ShotMode { exact_expectation, sampled };

struct ShotPlan {
    int shots = 1024;
    std::uint64_t seed = 0;
    ShotMode mode = ShotMode::exact_expectation;

    static ShotPlan exact() { return {1, 0, ShotMode::exact_expectation}; }
    static ShotPlan sampled(int shots, std::uint64_t seed) { return {shots, seed, ShotMode::sampled}; }

    bool is_exact() const noexcept { return mode == ShotMode::exact_expectation; }

    void validate() const {
        if (shots < 1) {
            throw ConfigError("ShotPlan: shots must be >= 1 (got " + std::to_string(shots) + ")");
        }
    }

    std::mt19937_64 rng() const { return std::mt19937_64(seed); }

    /// A reproducible sub-plan for the k-th independent use of this plan.
    ShotPlan derived(std::uint64_t k) const {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
        std::uint32_t raw[2];
        seq.generate(raw, raw + 2);
        return {shots, (std::uint64_t{raw[0]} << 32) | raw[1], mode};
    }
};

/// Empirical frequency of a Bernoulli(p) outcome over `shots` draws.
inline double sample_frequency(double p, int shots, std::mt19937_64 &rng) {
    if (p <= 0.0) {
        return 0.0;
    }
    if (p >= 1.0) {
        return 1.0;
    }
    std::binomial_distribution<int> dist(shots, p);
    return static_cast<double>(dist(rng)) / shots;
}

} // namespace subalign::quantum
