#pragma once

// Sigma-smooth request generators with analytic certificates, the eta
// selector, the amortized offline lower-bound evaluators, and the
// delta-separated growth diagnostic.

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smoothbench/hypercube.hpp"
#include "smoothbench/metric.hpp"
#include "smoothbench/problems.hpp"
#include "smoothbench/rng.hpp"

namespace smoothbench {

enum class GeneratorKind { UniformBall, PerturbedBase, LowerBoundHypercube, Scripted };

inline const char* generator_name(GeneratorKind g) {
    switch (g) {
        case GeneratorKind::UniformBall: return "uniform";
        case GeneratorKind::PerturbedBase: return "perturbed";
        case GeneratorKind::LowerBoundHypercube: return "hypercube";
        case GeneratorKind::Scripted: return "scripted";
    }
    return "?";
}

// Declarative description of a request source. The base schedule of a
// perturbed generator may be adaptive ("farthest" reacts to the realized
// history); marginals stay inside the certified family either way.
struct GeneratorDescriptor {
    GeneratorKind kind = GeneratorKind::UniformBall;
    Problem problem = Problem::KServer;
    int k = 1;                  // servers/taxis, and the hypercube family parameter
    int chase_set_size = 0;     // request-set size for chasing (0 = use k)

    double rho = 0.0;                 // PerturbedBase perturbation radius
    std::string base_schedule = "fixed";  // fixed | cycle | farthest
    std::vector<Point> base_points;

    std::vector<Request> script;  // Scripted replay (sigma = 0 label)
};

// Adaptive adversary: chooses the next step's descriptor (or stops) after
// seeing the realized prefix, never the algorithm's coins.
using AdaptiveAdversary =
    std::function<std::optional<GeneratorDescriptor>(const std::vector<Request>& history)>;

// Certified sigma under the equivalent form of the smoothness definition:
// every marginal density is at most 1/(sigma * vol(B_M)).
inline double sigma_of_generator(const GeneratorDescriptor& desc, const Ball& ball) {
    switch (desc.kind) {
        case GeneratorKind::UniformBall:
            return 1.0;
        case GeneratorKind::PerturbedBase: {
            if (desc.rho <= 0.0)
                throw std::invalid_argument("sigma_of_generator: rho must be > 0 for a smooth instance");
            if (desc.rho > ball.radius)
                throw std::invalid_argument("sigma_of_generator: perturbation ball does not fit in B_M");
            return std::pow(desc.rho / ball.radius, ball.space.dim);
        }
        case GeneratorKind::LowerBoundHypercube: {
            const auto inst = HypercubeInstance::make(desc.k);
            const double corner = std::pow(inst.eps, inst.m);
            // Pickup/drop-off pairs concentrate the destination marginal on a
            // single corner cube, so the taxi certificate loses the (k+1)
            // factor enjoyed by the uniform-over-P marginals.
            if (desc.problem == Problem::KTaxi) return corner;
            return (inst.k + 1) * corner;
        }
        case GeneratorKind::Scripted:
            throw std::invalid_argument("sigma_of_generator: scripted instances carry no certificate");
    }
    throw std::invalid_argument("sigma_of_generator: bad descriptor");
}

namespace detail {

inline Point base_for(const GeneratorDescriptor& desc, const Ball& ball,
                      const std::vector<Request>& history, size_t point_index) {
    const double inner_r = ball.radius - desc.rho;
    if (desc.base_schedule == "fixed" || desc.base_schedule == "cycle") {
        if (desc.base_points.empty())
            throw std::invalid_argument("perturbed generator: base schedule has no points");
        // fixed: the i-th request point always perturbs base_points[i];
        // cycle: the ring additionally advances one slot per step.
        size_t idx = point_index;
        if (desc.base_schedule == "cycle") idx += history.size();
        const Point& b = desc.base_points[idx % desc.base_points.size()];
        if (distance(ball.space, b, ball.center) > inner_r)
            throw std::invalid_argument("perturbed generator: base point outside the inner ball");
        return b;
    }
    if (desc.base_schedule == "farthest") {
        // Adaptive: head for the inner-ball point opposite the previous
        // realized request point.
        Point dir(ball.space.dim, 0.0);
        dir[0] = 1.0;
        if (!history.empty() && !history.back().points.empty()) {
            const Point& prev = history.back().points[0];
            const double d = distance(ball.space, prev, ball.center);
            if (d > 0.0) {
                for (int i = 0; i < ball.space.dim; ++i) dir[i] = (ball.center[i] - prev[i]) / d;
            }
        }
        Point b(ball.space.dim);
        for (int i = 0; i < ball.space.dim; ++i) b[i] = ball.center[i] + inner_r * dir[i];
        // Direction is normalized in the ball's own norm, so b stays inside.
        return b;
    }
    throw std::invalid_argument("perturbed generator: unknown base schedule " + desc.base_schedule);
}

}  // namespace detail

// Draws the next request. `history` holds realized requests r_1..r_{t-1};
// adaptivity may read it, the algorithm's randomness is invisible here.
inline Request sample_request(const GeneratorDescriptor& desc, const Ball& ball,
                              const std::vector<Request>& history, Rng& rng) {
    const int set_size = (desc.chase_set_size > 0) ? desc.chase_set_size : desc.k;
    switch (desc.kind) {
        case GeneratorKind::UniformBall: {
            Request req;
            req.problem = desc.problem;
            const int npts = (desc.problem == Problem::KServer) ? 1
                             : (desc.problem == Problem::KTaxi) ? 2
                                                                : set_size;
            for (int i = 0; i < npts; ++i)
                req.points.push_back(sample_in_ball(rng, ball.space, ball.center, ball.radius));
            return req;
        }
        case GeneratorKind::PerturbedBase: {
            if (desc.rho <= 0.0 || desc.rho > ball.radius)
                throw std::invalid_argument("sample_request: invalid perturbation radius");
            Request req;
            req.problem = desc.problem;
            const int npts = (desc.problem == Problem::KServer) ? 1
                             : (desc.problem == Problem::KTaxi) ? 2
                                                                : set_size;
            for (int i = 0; i < npts; ++i) {
                const Point base = detail::base_for(desc, ball, history, i);
                req.points.push_back(sample_in_ball(rng, ball.space, base, desc.rho));
            }
            return req;
        }
        case GeneratorKind::LowerBoundHypercube: {
            const auto inst = HypercubeInstance::make(desc.k);
            Request req;
            req.problem = desc.problem;
            switch (desc.problem) {
                case Problem::KServer: {
                    const int v = static_cast<int>(rng.uniform_index(inst.k + 1));
                    req.points.push_back(inst.sample_near(v, rng));
                    break;
                }
                case Problem::KTaxi: {
                    const int v = static_cast<int>(rng.uniform_index(inst.k + 1));
                    req.points.push_back(inst.sample_near(v, rng));
                    req.points.push_back(inst.sample_near(v, rng));
                    break;
                }
                case Problem::Chasing: {
                    // k points near the k vertices remaining after excluding
                    // one uniformly; random order keeps each coordinate
                    // marginal uniform over the near set.
                    const int excluded = static_cast<int>(rng.uniform_index(inst.k + 1));
                    std::vector<int> chosen;
                    for (int v = 0; v <= inst.k; ++v)
                        if (v != excluded) chosen.push_back(v);
                    for (size_t i = chosen.size(); i > 1; --i) {
                        const size_t j = rng.uniform_index(i);
                        std::swap(chosen[i - 1], chosen[j]);
                    }
                    for (int v : chosen) req.points.push_back(inst.sample_near(v, rng));
                    break;
                }
            }
            return req;
        }
        case GeneratorKind::Scripted: {
            if (history.size() >= desc.script.size())
                throw std::out_of_range("sample_request: scripted generator exhausted");
            return desc.script[history.size()];
        }
    }
    throw std::invalid_argument("sample_request: bad descriptor");
}

namespace detail {
inline double poly_k_of(Problem problem, int k) {
    return (problem == Problem::Chasing) ? 2.0 * static_cast<double>(k) * k : 8.0 * k;
}

// The separation radius delta from the per-problem offline lower bounds.
inline double offline_delta(Problem problem, double sigma, int k, int m, double radius) {
    if (!(sigma > 0.0 && sigma <= 1.0))
        throw std::invalid_argument("sigma must lie in (0, 1]");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    return radius * std::pow(sigma / poly_k_of(problem, k), 1.0 / m);
}
}  // namespace detail

// Expected amortized offline cost per request is at least this value on
// sigma-smooth instances (delta/8 for k-server and k-taxi, delta/2 for
// chasing).
inline double opt_amortized_bound(Problem problem, double sigma, int k, int m, double radius) {
    const double delta = detail::offline_delta(problem, sigma, k, m, radius);
    return (problem == Problem::Chasing) ? delta / 2.0 : delta / 8.0;
}

// Net granularity: eta = 3 * delta for the matching problem. Values above
// the ball radius signal the singleton-net regime to the caller.
inline double choose_eta(Problem problem, double sigma, int k, int m, double radius) {
    return 3.0 * detail::offline_delta(problem, sigma, k, m, radius);
}

struct GrowthLog {
    size_t final_size = 0;
    std::vector<char> inserted;  // one flag per window position
};

// Replays the delta-separated subset construction on a window of 4k
// requests. k-server: insert r_i iff it stays delta-separated from the
// subset. k-taxi: insert iff the pickup is farther than delta from the
// drop-offs of all earlier window requests.
inline GrowthLog delta_separated_growth(Problem problem, const NormedSpace& space,
                                        const std::vector<Request>& window, double delta) {
    GrowthLog log;
    log.inserted.reserve(window.size());
    if (problem == Problem::KServer) {
        std::vector<Point> subset;
        for (const auto& req : window) {
            const Point& r = req.points[0];
            bool ok = true;
            for (const auto& s : subset) {
                if (distance(space, r, s) <= delta) {
                    ok = false;
                    break;
                }
            }
            log.inserted.push_back(ok);
            if (ok) subset.push_back(r);
        }
        log.final_size = subset.size();
        return log;
    }
    if (problem == Problem::KTaxi) {
        size_t size = 0;
        std::vector<Point> dests;
        for (const auto& req : window) {
            const Point& a = req.points[0];
            bool ok = true;
            for (const auto& b : dests) {
                if (distance(space, a, b) <= delta) {
                    ok = false;
                    break;
                }
            }
            log.inserted.push_back(ok);
            if (ok) ++size;
            dests.push_back(req.points[1]);
        }
        log.final_size = size;
        return log;
    }
    throw std::invalid_argument("delta_separated_growth: defined for k-server and k-taxi windows");
}

}  // namespace smoothbench
