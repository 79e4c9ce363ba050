#pragma once

// The hypercube near-vertex instance family: [0,1]^m under Linf with k+1
// marked vertices and requests confined to their eps-corner cubes.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "smoothbench/metric.hpp"
#include "smoothbench/rng.hpp"

namespace smoothbench {

struct HypercubeInstance {
    int k = 2;
    int m = 2;
    double eps = 0.25;
    std::vector<Point> vertices;  // k+1 cube corners, lexicographic coordinate order

    static HypercubeInstance make(int k) {
        if (k < 2) throw std::invalid_argument("hypercube instance needs k >= 2");
        HypercubeInstance inst;
        inst.k = k;
        inst.m = static_cast<int>(std::ceil(std::log2(static_cast<double>(k + 1))));
        inst.eps = 1.0 / (2.0 * k * std::log2(static_cast<double>(k)));
        if (inst.eps > 0.25) throw std::logic_error("hypercube instance: eps exceeds 1/4");
        inst.vertices.reserve(k + 1);
        for (int v = 0; v <= k; ++v) {
            Point p(inst.m, 0.0);
            for (int i = 0; i < inst.m; ++i) p[i] = (v >> (inst.m - 1 - i)) & 1;
            inst.vertices.push_back(std::move(p));
        }
        return inst;
    }

    NormedSpace space() const { return NormedSpace(m, Norm::Linf); }

    Ball ball() const { return Ball(space(), Point(m, 0.5), 0.5); }

    // Nearest marked vertex in Linf; unique for points of the near set since
    // eps <= 1/4 keeps corner cubes disjoint.
    int vertex_of(const Point& p) const {
        const NormedSpace sp = space();
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t v = 0; v < vertices.size(); ++v) {
            const double d = distance(sp, p, vertices[v]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(v);
            }
        }
        return best;
    }

    bool in_near_set(const Point& p) const {
        const NormedSpace sp = space();
        return distance(sp, p, vertices[vertex_of(p)]) <= eps;
    }

    // Uniform sample from the eps-corner cube of a vertex (the intersection
    // of its eps-ball with the cube).
    Point sample_near(int vertex, Rng& rng) const {
        Point p(m);
        for (int i = 0; i < m; ++i) {
            const double u = rng.uniform01() * eps;
            p[i] = (vertices[vertex][i] > 0.5) ? 1.0 - u : u;
        }
        return p;
    }
};

}  // namespace smoothbench
