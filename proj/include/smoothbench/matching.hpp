#pragma once

// Minimum-cost perfect matching between equal-size configurations.

#include <limits>
#include <stdexcept>
#include <vector>

#include "smoothbench/metric.hpp"

namespace smoothbench {

// Hungarian algorithm on a square cost matrix. Returns the minimum total
// cost; `assignment`, if given, receives column index per row.
inline double min_cost_assignment(const std::vector<std::vector<double>>& cost,
                                  std::vector<int>* assignment = nullptr) {
    const int n = static_cast<int>(cost.size());
    if (n == 0) return 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    double total = 0.0;
    if (assignment) assignment->assign(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (assignment) (*assignment)[p[j] - 1] = j - 1;
        total += cost[p[j] - 1][j - 1];
    }
    return total;
}

// Matching distance between two k-point configurations in M.
inline double config_matching_distance(const NormedSpace& space, const std::vector<Point>& a,
                                       const std::vector<Point>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("config_matching_distance: configurations differ in size");
    const int k = static_cast<int>(a.size());
    std::vector<std::vector<double>> cost(k, std::vector<double>(k, 0.0));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) cost[i][j] = distance(space, a[i], b[j]);
    return min_cost_assignment(cost);
}

}  // namespace smoothbench
