#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "circsym/grid.hpp"

namespace testutil {

using circsym::kPi;
using circsym::PolarGrid;
using circsym::ScalarField;

/// Smooth nonnegative bump sum, zero at the outer rim: admissible by
/// construction (u >= 0, vanishing lateral trace).
inline ScalarField random_bump_field(const PolarGrid& g, unsigned seed, int bumps = 4) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> C(-0.6 * g.rmax, 0.6 * g.rmax);
    std::uniform_real_distribution<double> A(0.2, 1.5);
    std::uniform_real_distribution<double> S(0.1 * g.rmax, 0.35 * g.rmax);
    struct Bump {
        double cx, cy, a, s;
    };
    std::vector<Bump> list;
    for (int b = 0; b < bumps; ++b) list.push_back({C(rng), C(rng), A(rng), S(rng)});
    ScalarField u(g);
    for (int i = 0; i < g.nr; ++i) {
        double r = g.r(i);
        double cut = std::max(0.0, 1.0 - (r / g.rmax) * (r / g.rmax));
        cut *= cut;
        for (int j = 0; j < g.ntheta; ++j) {
            double x = r * std::cos(g.theta(j)), y = r * std::sin(g.theta(j));
            double v = 0.0;
            for (const Bump& b : list) {
                double d2 = (x - b.cx) * (x - b.cx) + (y - b.cy) * (y - b.cy);
                v += b.a * std::exp(-d2 / (2.0 * b.s * b.s));
            }
            u.set(i, j, 0, v * cut);
        }
    }
    return u;
}

/// Rank order re-derived independently of the library: indices sorted by
/// (|theta| ascending, positive theta first), via the exact half-cell offset.
inline std::vector<int> oracle_rank_order(const PolarGrid& g) {
    std::vector<std::pair<long, int>> keyed;
    for (int j = 0; j < g.ntheta; ++j) {
        long off = 2L * j + 1 - g.ntheta;  // theta_j = off * dtheta / 2
        keyed.push_back({4 * std::labs(off) + (off < 0 ? 1 : 0), j});
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> order;
    for (auto& kv : keyed) order.push_back(kv.second);
    return order;
}

/// Brute-force quantile oracle: v at the rank-k cell is the smallest sample
/// value t with #{samples > t} <= k, scanned directly over the slice.
inline double oracle_quantile(std::vector<double> samples, int rank) {
    std::sort(samples.begin(), samples.end(), std::greater<>());
    // smallest t among samples with count_above(t) <= rank is samples[rank]
    return samples[static_cast<std::size_t>(rank)];
}

}  // namespace testutil
