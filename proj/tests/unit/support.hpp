#pragma once

// Shared fixtures: the two worked map families used across the suites and
// generators for randomized instances.

#include <cstdint>
#include <vector>

#include "srb/market.hpp"
#include "srb/orbit_engine.hpp"
#include "srb/rng.hpp"

namespace srb::testing {

// tau1: 3r^2 on [0,1/3], 1 - 1.5(r-1)^2 on (1/3,1].
// Fixed points {0, 1/3, 1}; below the diagonal on (0,1/3), above on (1/3,1).
inline MonotoneMap two_branch_first() {
    return MonotoneMap::piecewise({0.0, 1.0 / 3.0, 1.0},
                                  {{0.0, 0.0, 3.0}, {-0.5, 3.0, -1.5}});
}

// tau2: 1.5r^2 on [0,2/3], 1 - 3(r-1)^2 on (2/3,1].
// Fixed points {0, 2/3, 1}; below the diagonal on (0,2/3), above on (2/3,1).
inline MonotoneMap two_branch_second() {
    return MonotoneMap::piecewise({0.0, 2.0 / 3.0, 1.0},
                                  {{0.0, 0.0, 1.5}, {-2.0, 6.0, -3.0}});
}

// The two-attractor system: both endpoint masses attract, with basins
// [0, 1/3] and [2/3, 1].
inline IFSystem two_attractor_system(double p1 = 0.5) {
    std::vector<MonotoneMap> maps;
    maps.push_back(two_branch_first());
    maps.push_back(two_branch_second());
    return IFSystem(std::move(maps), {p1, 1.0 - p1});
}

// Square-and-root pair: constant exponents 2 and 1/2, so the drift is
// (2 p1 - 1) ln 2 independent of the state.
inline IFSystem square_root_system(double p1) {
    std::vector<MonotoneMap> maps;
    maps.push_back(MonotoneMap::power(2.0));
    maps.push_back(MonotoneMap::power(0.5));
    return IFSystem(std::move(maps), {p1, 1.0 - p1});
}

// The coin-flip market: two assets, two states, asset k pays only in state k.
inline MarketModel unit_payoff_market() {
    return MarketModel({{1.0, 0.0}, {0.0, 1.0}}, {0.5, 0.5});
}

// Random strictly increasing piecewise-quadratic system over a shared pool of
// interior fixed points. Map 0 (the skeleton) keeps the whole pool with
// instance-level cell orientations; later maps may drop pool points and
// re-orient interior cells, which creates cross-map interval structure. All
// maps share the orientation of the two endpoint-adjacent cells, so each
// endpoint either attracts every map or repels every map.
inline IFSystem random_piecewise_system(std::uint64_t seed) {
    CounterRng rng(seed, 0xABCDEF);
    const int pool_size = 1 + static_cast<int>(rng.next_u64() % 4);
    std::vector<double> pool;
    while (static_cast<int>(pool.size()) < pool_size) {
        const double x = 0.15 + 0.7 * rng.next_unit();
        bool spaced = true;
        for (double y : pool) spaced = spaced && std::abs(x - y) > 0.08;
        if (spaced) pool.push_back(x);
    }
    std::sort(pool.begin(), pool.end());

    std::vector<double> base_sign(pool.size() + 1);
    for (auto& s : base_sign) s = rng.next_unit() < 0.5 ? 1.0 : -1.0;

    const int map_count = 1 + static_cast<int>(rng.next_u64() % 3);
    std::vector<MonotoneMap> maps;
    for (int m = 0; m < map_count; ++m) {
        const bool wanderer = m > 0 && rng.next_unit() < 0.6;
        std::vector<double> breaks{0.0};
        for (double x : pool) {
            if (!wanderer || rng.next_unit() < 0.5) breaks.push_back(x);
        }
        breaks.push_back(1.0);
        std::vector<std::vector<double>> coeffs;
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
            const double a = breaks[i];
            const double b = breaks[i + 1];
            double sign;
            if (a == 0.0) {
                sign = base_sign.front();
            } else if (b == 1.0) {
                sign = base_sign.back();
            } else if (!wanderer) {
                sign = base_sign[i];
            } else {
                sign = rng.next_unit() < 0.5 ? 1.0 : -1.0;
            }
            const double c = sign * (0.2 + 0.7 * rng.next_unit()) * 0.9 / (b - a);
            // r + c (r - a)(b - r), expanded in ascending powers
            coeffs.push_back({-a * b * c, 1.0 + (a + b) * c, -c});
        }
        maps.push_back(MonotoneMap::piecewise(std::move(breaks), std::move(coeffs)));
    }

    std::vector<double> probs(static_cast<std::size_t>(map_count));
    double sum = 0.0;
    for (auto& p : probs) {
        p = 0.1 + 0.9 * rng.next_unit();
        sum += p;
    }
    for (auto& p : probs) p /= sum;
    return IFSystem(std::move(maps), std::move(probs));
}

// Random market model with K assets and L states; payoffs bounded away from
// zero so every column clears.
inline MarketModel random_market_model(std::uint64_t seed, int max_assets = 4,
                                       int max_states = 4) {
    CounterRng rng(seed, 0x51CA);
    const int K = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_assets - 1));
    const int L = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_states - 1));
    std::vector<std::vector<double>> payoffs(static_cast<std::size_t>(K),
                                             std::vector<double>(static_cast<std::size_t>(L)));
    for (auto& row : payoffs) {
        for (auto& d : row) d = 0.1 + 0.9 * rng.next_unit();
    }
    std::vector<double> probs(static_cast<std::size_t>(L));
    double sum = 0.0;
    for (auto& p : probs) {
        p = 0.1 + 0.9 * rng.next_unit();
        sum += p;
    }
    for (auto& p : probs) p /= sum;
    return MarketModel(std::move(payoffs), std::move(probs));
}

inline Strategy random_strategy(std::uint64_t seed, int assets) {
    CounterRng rng(seed, 0x57A7);
    std::vector<double> w(static_cast<std::size_t>(assets));
    double sum = 0.0;
    for (auto& x : w) {
        x = 0.05 + 0.95 * rng.next_unit();
        sum += x;
    }
    for (auto& x : w) x /= sum;
    return Strategy(std::move(w));
}

}  // namespace srb::testing
