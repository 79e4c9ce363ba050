#pragma once

// Test-only reference oracles, kept independent of the implementations they
// check: exhaustive enumeration for the offline optima and Belady's rule on
// uniform metrics.

#include <algorithm>
#include <limits>
#include <vector>

#include "smoothbench/metric.hpp"
#include "smoothbench/problems.hpp"

namespace oracles {

using smoothbench::Configuration;
using smoothbench::NormedSpace;
using smoothbench::Point;
using smoothbench::Request;

// Minimum k-server cost by trying every assignment of servers to requests.
inline double brute_force_kserver(const NormedSpace& space, const Configuration& initial,
                                  const std::vector<Point>& requests) {
    double best = std::numeric_limits<double>::infinity();
    Configuration config = initial;
    const auto recurse = [&](auto&& self, size_t t, double acc) -> void {
        if (acc >= best) return;
        if (t == requests.size()) {
            best = acc;
            return;
        }
        for (size_t sid = 0; sid < config.size(); ++sid) {
            const Point saved = config[sid];
            const double d = smoothbench::distance(space, saved, requests[t]);
            config[sid] = requests[t];
            self(self, t + 1, acc + d);
            config[sid] = saved;
        }
    };
    recurse(recurse, 0, 0.0);
    return best;
}

// Minimum chasing cost by trying every choice sequence.
inline double brute_force_chasing(const NormedSpace& space, const Point& initial,
                                  const std::vector<Request>& requests) {
    double best = std::numeric_limits<double>::infinity();
    const auto recurse = [&](auto&& self, size_t t, const Point& pos, double acc) -> void {
        if (acc >= best) return;
        if (t == requests.size()) {
            best = acc;
            return;
        }
        for (const Point& p : requests[t].points)
            self(self, t + 1, p, acc + smoothbench::distance(space, pos, p));
    };
    recurse(recurse, 0, initial, 0.0);
    return best;
}

// Belady / furthest-in-future eviction count on a uniform metric, where it
// is exactly optimal: k-server cost = miss count times the uniform distance.
inline size_t belady_miss_count(int n_points, const std::vector<int>& initial,
                                const std::vector<int>& requests) {
    std::vector<std::vector<size_t>> occ(n_points);
    for (size_t t = 0; t < requests.size(); ++t) occ[requests[t]].push_back(t);
    const auto next_after = [&](int point, size_t t) -> long long {
        const auto& times = occ[point];
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        return (it == times.end()) ? std::numeric_limits<long long>::max()
                                   : static_cast<long long>(*it);
    };

    std::vector<char> covered(n_points, 0);
    std::vector<int> holders = initial;
    for (int p : initial) covered[p] = 1;
    size_t misses = 0;
    for (size_t t = 0; t < requests.size(); ++t) {
        const int q = requests[t];
        if (covered[q]) continue;
        ++misses;
        // Evict the covered point whose next request is furthest away.
        size_t victim_slot = 0;
        long long victim_next = -1;
        for (size_t slot = 0; slot < holders.size(); ++slot) {
            const long long next = next_after(holders[slot], t);
            if (next > victim_next) {
                victim_next = next;
                victim_slot = slot;
            }
        }
        covered[holders[victim_slot]] = 0;
        covered[q] = 1;
        holders[victim_slot] = q;
    }
    return misses;
}

}  // namespace oracles
