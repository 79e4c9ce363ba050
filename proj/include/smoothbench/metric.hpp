#pragma once

// Normed-space geometry: points, distances, enclosing balls, finite metrics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace smoothbench {

using Point = std::vector<double>;

enum class Norm { L1, L2, Linf };

inline const char* norm_name(Norm n) {
    switch (n) {
        case Norm::L1: return "l1";
        case Norm::L2: return "l2";
        case Norm::Linf: return "linf";
    }
    return "?";
}

inline Norm norm_from_name(const std::string& s) {
    if (s == "l1" || s == "L1") return Norm::L1;
    if (s == "l2" || s == "L2") return Norm::L2;
    if (s == "linf" || s == "Linf" || s == "LINF") return Norm::Linf;
    throw std::invalid_argument("unknown norm: " + s);
}

struct NormedSpace {
    int dim = 1;
    Norm norm = Norm::L2;

    NormedSpace() = default;
    NormedSpace(int m, Norm n) : dim(m), norm(n) {
        if (m < 1) throw std::invalid_argument("dimension must be >= 1");
    }
};

inline double distance(const NormedSpace& space, const Point& x, const Point& y) {
    if (static_cast<int>(x.size()) != space.dim || static_cast<int>(y.size()) != space.dim)
        throw std::invalid_argument("distance: point dimension mismatch");
    double acc = 0.0;
    switch (space.norm) {
        case Norm::L1:
            for (int i = 0; i < space.dim; ++i) acc += std::abs(x[i] - y[i]);
            return acc;
        case Norm::L2:
            for (int i = 0; i < space.dim; ++i) {
                const double d = x[i] - y[i];
                acc += d * d;
            }
            return std::sqrt(acc);
        case Norm::Linf:
            for (int i = 0; i < space.dim; ++i) acc = std::max(acc, std::abs(x[i] - y[i]));
            return acc;
    }
    return acc;
}

inline double point_norm(const NormedSpace& space, const Point& x) {
    return distance(space, x, Point(x.size(), 0.0));
}

struct Ball {
    NormedSpace space;
    Point center;
    double radius = 1.0;

    Ball() : center{0.0} {}
    Ball(NormedSpace s, Point c, double r) : space(s), center(std::move(c)), radius(r) {
        if (radius < 0.0) throw std::invalid_argument("ball radius must be >= 0");
        if (static_cast<int>(center.size()) != space.dim)
            throw std::invalid_argument("ball center dimension mismatch");
    }

    bool contains(const Point& x) const { return distance(space, x, center) <= radius; }
};

// Volume of a radius-r ball under the space's norm. Used by the density
// certificates, where only ratios of volumes matter.
inline double ball_volume(const NormedSpace& space, double r) {
    const int m = space.dim;
    switch (space.norm) {
        case Norm::Linf: return std::pow(2.0 * r, m);
        case Norm::L1: return std::pow(2.0 * r, m) / std::tgamma(m + 1.0);
        case Norm::L2: return std::pow(r, m) * std::pow(M_PI, m / 2.0) / std::tgamma(m / 2.0 + 1.0);
    }
    return 0.0;
}

struct FiniteMetric {
    NormedSpace space;
    std::vector<Point> points;
};

// Largest pairwise distance over smallest non-zero pairwise distance.
inline double aspect_ratio(const FiniteMetric& fm) {
    const size_t n = fm.points.size();
    if (n < 2) throw std::invalid_argument("aspect_ratio: need at least 2 points");
    double dmax = 0.0;
    double dmin = -1.0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            const double d = distance(fm.space, fm.points[i], fm.points[j]);
            dmax = std::max(dmax, d);
            if (d > 0.0 && (dmin < 0.0 || d < dmin)) dmin = d;
        }
    }
    if (dmin <= 0.0) throw std::invalid_argument("aspect_ratio: all pairwise distances are zero");
    return dmax / dmin;
}

}  // namespace smoothbench
