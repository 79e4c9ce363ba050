#pragma once

// Deterministic random-number helpers. All experiment code draws through
// these so that (scenario, seed) pins the byte stream regardless of the
// standard library's distribution implementations.

#include <cstdint>
#include <random>

#include "smoothbench/metric.hpp"

namespace smoothbench {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) { return splitmix64(splitmix64(a) ^ (0x9e3779b97f4a7c15ULL + b)); }

class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(splitmix64(seed)) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n).
    uint64_t uniform_index(uint64_t n) {
        // Debiased via rejection on the top range.
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    double exponential() {
        double u = uniform01();
        while (u <= 0.0) u = uniform01();
        return -std::log(u);
    }

    // Polar Box-Muller; spare value cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Uniform sample from the radius-r ball around `center` under the space's
// norm. The result is clamped into the closed ball so membership tests with
// exact <= never fail on rounding.
inline Point sample_in_ball(Rng& rng, const NormedSpace& space, const Point& center, double r) {
    const int m = space.dim;
    Point x(m, 0.0);
    switch (space.norm) {
        case Norm::Linf:
            for (int i = 0; i < m; ++i) x[i] = rng.uniform(-1.0, 1.0);
            break;
        case Norm::L2: {
            double nrm2 = 0.0;
            for (int i = 0; i < m; ++i) {
                x[i] = rng.normal();
                nrm2 += x[i] * x[i];
            }
            const double nrm = std::sqrt(nrm2);
            const double scale = (nrm > 0.0) ? std::pow(rng.uniform01(), 1.0 / m) / nrm : 0.0;
            for (int i = 0; i < m; ++i) x[i] *= scale;
            break;
        }
        case Norm::L1: {
            // (|x_1|,...,|x_m|, slack)/r ~ Dirichlet(1,...,1) gives uniform
            // mass over the cross-polytope.
            double total = rng.exponential();
            for (int i = 0; i < m; ++i) {
                const double e = rng.exponential();
                x[i] = (rng.next_u64() & 1u) ? e : -e;
                total += e;
            }
            for (int i = 0; i < m; ++i) x[i] /= total;
            break;
        }
    }
    Point out(m);
    for (int i = 0; i < m; ++i) out[i] = center[i] + r * x[i];
    const double d = distance(space, out, center);
    if (d > r && d > 0.0) {
        const double shrink = r / d;
        for (int i = 0; i < m; ++i) out[i] = center[i] + (out[i] - center[i]) * shrink;
    }
    return out;
}

}  // namespace smoothbench
