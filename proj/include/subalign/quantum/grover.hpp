#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "subalign/error.hpp"
#include "subalign/quantum/sampling.hpp"

namespace subalign::quantum {

inline constexpr std::size_t kMaxSearchSize = std::size_t{1} << 12;

struct MinFindResult {
    std::size_t index = 0;
    std::uint64_t queries = 0;        ///< Grover iterations spent, all repeats
    std::uint64_t queries_to_min = 0; ///< iterations up to the last threshold update
    int updates = 0;                  ///< threshold improvements
};

/// Oracle-call budget of one minimum-finding run: ceil(22.5 sqrt(N) + 1.4 log2(N)^2).
inline std::uint64_t durr_hoyer_budget(std::size_t n) {
    const double lg = std::log2(static_cast<double>(n));
    return static_cast<std::uint64_t>(std::ceil(22.5 * std::sqrt(static_cast<double>(n)) + 1.4 * lg * lg));
}

/// Uniform superposition over N items after `iterations` Grover steps with the
/// given marked set; returns one measured index.
inline std::size_t grover_measure(const std::vector<char> &marked, std::uint64_t iterations,
                                  std::mt19937_64 &rng) {
    const std::size_t n = marked.size();
    std::vector<double> amp(n, 1.0 / std::sqrt(static_cast<double>(n)));
    for (std::uint64_t it = 0; it < iterations; ++it) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (marked[i]) {
                amp[i] = -amp[i];
            }
            mean += amp[i];
        }
        mean /= static_cast<double>(n);
        for (auto &a : amp) {
            a = 2.0 * mean - a;
        }
    }
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = amp[i] * amp[i];
    }
    std::discrete_distribution<std::size_t> dist(p.begin(), p.end());
    return dist(rng);
}

/// One Durr-Hoyer run: random initial threshold, then BBHT searches for a
/// smaller value (m <- min(6m/5, sqrt N), j uniform in [0, m)) until the query
/// budget is spent.
inline MinFindResult durr_hoyer_run(const std::vector<double> &values, std::mt19937_64 &rng) {
    const std::size_t n = values.size();
    MinFindResult out;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    out.index = pick(rng);
    if (n == 1) {
        return out;
    }
    const std::uint64_t budget = durr_hoyer_budget(n);
    const double root = std::sqrt(static_cast<double>(n));
    std::vector<char> marked(n);
    auto refresh = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            marked[i] = values[i] < values[out.index] ? 1 : 0;
        }
    };
    refresh();
    double m = 1.0;
    while (out.queries < budget) {
        const auto jmax = static_cast<std::uint64_t>(std::ceil(m));
        std::uniform_int_distribution<std::uint64_t> pick_j(0, jmax - 1);
        const std::uint64_t j = std::min(pick_j(rng), budget - out.queries);
        out.queries += j;
        const std::size_t i = grover_measure(marked, j, rng);
        if (values[i] < values[out.index]) {
            out.index = i;
            ++out.updates;
            out.queries_to_min = out.queries;
            refresh();
            m = 1.0;
        } else {
            m = std::min(m * 6.0 / 5.0, root);
        }
    }
    return out;
}

/// Best of `repeats` independent runs (failure probability <= 2^-repeats).
inline MinFindResult grover_min_find(const std::vector<double> &values, const ShotPlan &plan, int repeats = 1) {
    if (values.empty()) {
        throw ConfigError("grover_min_find: empty input");
    }
    if (values.size() > kMaxSearchSize) {
        throw CapError("grover_min_find: N = " + std::to_string(values.size()) + " exceeds 2^12");
    }
    if (repeats < 1) {
        throw ConfigError("grover_min_find: repeats must be >= 1");
    }
    auto rng = plan.rng();
    MinFindResult best;
    std::uint64_t total = 0;
    for (int r = 0; r < repeats; ++r) {
        const MinFindResult run = durr_hoyer_run(values, rng);
        total += run.queries;
        if (r == 0 || values[run.index] < values[best.index]) {
            best = run;
        }
    }
    best.queries = total;
    return best;
}

} // namespace subalign::quantum
