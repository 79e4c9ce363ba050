#pragma once

// Eta-nets of an enclosing ball: greedy construction over a candidate
// stream, nearest-net-point projection, and property verification.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "smoothbench/metric.hpp"
#include "smoothbench/rng.hpp"

namespace smoothbench {

// Uniform Linf-cell bucketing over the ball's bounding box. Hash collisions
// merge buckets, which only widens candidate lists; ring lower bounds stay
// valid because L1 and L2 distances dominate Linf.
class PointGridIndex {
public:
    PointGridIndex() = default;

    PointGridIndex(const Ball& ball, double cell_side) : ball_(ball), side_(cell_side) {
        if (side_ <= 0.0) side_ = std::max(ball.radius, 1e-12);
        lo_.resize(ball.space.dim);
        for (int i = 0; i < ball.space.dim; ++i) lo_[i] = ball.center[i] - ball.radius;
        cells_per_axis_ = static_cast<int>(std::ceil(2.0 * ball.radius / side_)) + 1;
    }

    void insert(const Point& p, int id) {
        buckets_[key_of(cell_of(p))].push_back(id);
        points_.push_back(p);
    }

    // Nearest stored point to x; ties go to the lowest id. Returns (id, dist).
    std::pair<int, double> nearest(const Point& x) const {
        const int m = ball_.space.dim;
        std::vector<int> center = cell_of(x);
        int best_id = -1;
        double best_d = std::numeric_limits<double>::infinity();
        const int max_ring = cells_per_axis_ + 1;
        for (int ring = 0; ring <= max_ring; ++ring) {
            if (best_id >= 0 && static_cast<double>(ring - 1) * side_ > best_d) break;
            scan_ring(center, ring, x, best_id, best_d);
        }
        if (best_id < 0) {
            // Degenerate fallback; only reachable on an empty index.
            for (size_t i = 0; i < points_.size(); ++i) {
                const double d = distance(ball_.space, x, points_[i]);
                if (d < best_d) {
                    best_d = d;
                    best_id = static_cast<int>(i);
                }
            }
        }
        return {best_id, best_d};
    }

    size_t size() const { return points_.size(); }

private:
    std::vector<int> cell_of(const Point& p) const {
        const int m = ball_.space.dim;
        std::vector<int> c(m);
        for (int i = 0; i < m; ++i) {
            int v = static_cast<int>(std::floor((p[i] - lo_[i]) / side_));
            if (v < 0) v = 0;
            if (v >= cells_per_axis_) v = cells_per_axis_ - 1;
            c[i] = v;
        }
        return c;
    }

    static uint64_t key_of(const std::vector<int>& c) {
        uint64_t h = 1469598103934665603ULL;
        for (int v : c) {
            h ^= static_cast<uint64_t>(static_cast<uint32_t>(v));
            h *= 1099511628211ULL;
        }
        return h;
    }

    void scan_bucket(const std::vector<int>& cell, const Point& x, int& best_id, double& best_d) const {
        auto it = buckets_.find(key_of(cell));
        if (it == buckets_.end()) return;
        for (int id : it->second) {
            const double d = distance(ball_.space, x, points_[id]);
            if (d < best_d || (d == best_d && id < best_id)) {
                best_d = d;
                best_id = id;
            }
        }
    }

    void scan_ring(const std::vector<int>& center, int ring, const Point& x, int& best_id,
                   double& best_d) const {
        const int m = ball_.space.dim;
        std::vector<int> off(m, -ring), cell(m);
        while (true) {
            int linf = 0;
            for (int i = 0; i < m; ++i) linf = std::max(linf, std::abs(off[i]));
            if (linf == ring) {
                bool in_grid = true;
                for (int i = 0; i < m; ++i) {
                    cell[i] = center[i] + off[i];
                    if (cell[i] < 0 || cell[i] >= cells_per_axis_) {
                        in_grid = false;
                        break;
                    }
                }
                if (in_grid) scan_bucket(cell, x, best_id, best_d);
            }
            int axis = 0;
            while (axis < m && off[axis] == ring) {
                off[axis] = -ring;
                ++axis;
            }
            if (axis == m) break;
            ++off[axis];
        }
    }

    Ball ball_;
    double side_ = 1.0;
    std::vector<double> lo_;
    int cells_per_axis_ = 1;
    std::unordered_map<uint64_t, std::vector<int>> buckets_;
    std::vector<Point> points_;
};

struct NetReport {
    bool separated = false;
    bool dense = false;
    bool size_ok = false;
    double max_projection_distance = 0.0;
    double min_pairwise_distance = 0.0;
    size_t net_size = 0;
    double size_bound = 0.0;
};

struct Net {
    Ball ball;
    double eta = 0.0;
    std::vector<Point> points;
    PointGridIndex index;

    double size_bound() const { return std::pow(3.0 * ball.radius / eta, ball.space.dim); }

    // Nearest net point to x, lowest id on ties. No ball-membership check.
    std::pair<int, double> nearest(const Point& x) const { return index.nearest(x); }

    FiniteMetric finite_metric() const { return FiniteMetric{ball.space, points}; }
};

// Hand-assembled net (no greedy pass); used for counter-example fixtures
// and replay from serialized form.
inline Net make_net_from_points(const Ball& ball, double eta, std::vector<Point> pts) {
    if (eta <= 0.0) throw std::invalid_argument("net eta must be > 0");
    if (pts.empty()) throw std::invalid_argument("net needs at least one point");
    Net net;
    net.ball = ball;
    net.eta = eta;
    net.points = std::move(pts);
    net.index = PointGridIndex(ball, eta);
    for (size_t i = 0; i < net.points.size(); ++i) net.index.insert(net.points[i], static_cast<int>(i));
    return net;
}

struct NetBuildOptions {
    size_t probes_per_round = 300000;  // seeded uniform repair probes per round
    int max_repair_rounds = 50;
    int clean_rounds_required = 2;
    uint64_t probe_seed = 0x6e657470726f6265ULL;
    size_t max_lattice_points = 30'000'000;
    size_t max_net_points = 2'000'000;
};

// Greedy insertion over an explicit candidate stream: a candidate enters the
// net iff it is farther than eta from every point inserted so far.
inline Net build_eta_net_from_stream(const Ball& ball, double eta,
                                     const std::function<bool(Point&)>& next_candidate,
                                     size_t max_net_points = 2'000'000) {
    if (eta <= 0.0) throw std::invalid_argument("build_eta_net: eta must be > 0");
    Net net;
    net.ball = ball;
    net.eta = eta;
    net.index = PointGridIndex(ball, eta);
    Point cand(ball.space.dim);
    size_t seen = 0;
    while (next_candidate(cand)) {
        ++seen;
        if (net.points.empty()) {
            net.points.push_back(cand);
            net.index.insert(cand, 0);
            continue;
        }
        const auto [id, d] = net.index.nearest(cand);
        (void)id;
        if (d > eta) {
            if (net.points.size() >= max_net_points)
                throw std::runtime_error("build_eta_net: net exceeds the configured size guard");
            net.index.insert(cand, static_cast<int>(net.points.size()));
            net.points.push_back(cand);
        }
    }
    if (seen == 0) throw std::invalid_argument("build_eta_net: empty candidate stream");
    return net;
}

// Builds the net over the ball: deterministic axis-aligned lattice first
// (spacing eta/2, tightened by sqrt(m) for L2), then rounds of seeded
// uniform probes until a full round inserts nothing. Every insertion is the
// same greedy rule, so the separation and size-bound guarantees are
// unaffected; the probe rounds close residual density holes that a finite
// lattice can leave near the boundary.
inline Net build_eta_net(const Ball& ball, double eta, const NetBuildOptions& opts = {}) {
    if (eta <= 0.0) throw std::invalid_argument("build_eta_net: eta must be > 0");
    const int m = ball.space.dim;

    if (eta > ball.radius || ball.radius == 0.0) {
        // Singleton net at the center: every ball point is within
        // radius <= eta of it.
        return make_net_from_points(ball, eta, {ball.center});
    }

    double spacing = eta / 2.0;
    if (ball.space.norm == Norm::L2) spacing = eta / (2.0 * std::sqrt(static_cast<double>(m)));

    const int per_axis = static_cast<int>(std::ceil(2.0 * ball.radius / spacing)) + 1;
    double total = 1.0;
    for (int i = 0; i < m; ++i) total *= per_axis;
    if (total > static_cast<double>(opts.max_lattice_points))
        throw std::runtime_error("build_eta_net: lattice candidate count exceeds guard (eta too small)");

    const double step = 2.0 * ball.radius / (per_axis - 1);
    std::vector<int> odo(m, 0);
    bool lattice_done = false;
    Point scratch(m);

    Rng probe_rng(mix_seed(opts.probe_seed, static_cast<uint64_t>(per_axis) * 1315423911ULL + m));
    size_t probes_left = 0;
    int rounds_done = 0;

    Net net;
    size_t inserted_this_round = 0;
    int clean_rounds = 0;

    auto stream = [&](Point& out) -> bool {
        while (!lattice_done) {
            for (int i = 0; i < m; ++i) scratch[i] = ball.center[i] - ball.radius + step * odo[i];
            int axis = 0;
            while (axis < m && odo[axis] == per_axis - 1) {
                odo[axis] = 0;
                ++axis;
            }
            if (axis == m)
                lattice_done = true;
            else
                ++odo[axis];
            if (ball.contains(scratch)) {
                out = scratch;
                return true;
            }
        }
        return false;
    };
    net = build_eta_net_from_stream(ball, eta, stream, opts.max_net_points);

    // Repair rounds: any probe farther than eta from the net is itself a
    // legal greedy insertion.
    while (rounds_done < opts.max_repair_rounds && clean_rounds < opts.clean_rounds_required) {
        inserted_this_round = 0;
        probes_left = opts.probes_per_round;
        while (probes_left-- > 0) {
            Point p = sample_in_ball(probe_rng, ball.space, ball.center, ball.radius);
            const auto [id, d] = net.index.nearest(p);
            (void)id;
            if (d > eta) {
                net.index.insert(p, static_cast<int>(net.points.size()));
                net.points.push_back(p);
                ++inserted_this_round;
            }
        }
        ++rounds_done;
        clean_rounds = (inserted_this_round == 0) ? clean_rounds + 1 : 0;
    }
    return net;
}

// Nearest net point by linear scan; reference used to cross-check the grid.
inline std::pair<int, double> nearest_net_point_brute(const Net& net, const Point& x) {
    int best_id = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < net.points.size(); ++i) {
        const double d = distance(net.ball.space, x, net.points[i]);
        if (d < best_d || (d == best_d && static_cast<int>(i) < best_id)) {
            best_d = d;
            best_id = static_cast<int>(i);
        }
    }
    return {best_id, best_d};
}

// Projection pi(x): id of the nearest net point, lowest id on ties.
inline int project(const Net& net, const Point& x) {
    if (!net.ball.contains(x)) throw std::invalid_argument("project: point outside the ball");
    return net.nearest(x).first;
}

inline NetReport verify_net(const Net& net, const std::vector<Point>& test_points) {
    NetReport rep;
    rep.net_size = net.points.size();
    rep.size_bound = net.size_bound();
    rep.size_ok = static_cast<double>(rep.net_size) <= rep.size_bound;

    // Exact pairwise separation scan. Small nets get the literal O(n^2)
    // loop; big ones an incremental index pass (min over i of the distance
    // from point i to points 0..i-1 equals the min pairwise distance).
    rep.min_pairwise_distance = std::numeric_limits<double>::infinity();
    const size_t n = net.points.size();
    rep.separated = true;
    if (n <= 20000) {
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = i + 1; j < n; ++j) {
                const double d = distance(net.ball.space, net.points[i], net.points[j]);
                rep.min_pairwise_distance = std::min(rep.min_pairwise_distance, d);
            }
        }
    } else {
        PointGridIndex probe(net.ball, net.eta);
        probe.insert(net.points[0], 0);
        for (size_t i = 1; i < n; ++i) {
            rep.min_pairwise_distance =
                std::min(rep.min_pairwise_distance, probe.nearest(net.points[i]).second);
            probe.insert(net.points[i], static_cast<int>(i));
        }
    }
    if (n >= 2) rep.separated = rep.min_pairwise_distance > net.eta;
    else rep.min_pairwise_distance = 0.0;

    rep.dense = true;
    rep.max_projection_distance = 0.0;
    for (const Point& p : test_points) {
        const double d = net.nearest(p).second;
        rep.max_projection_distance = std::max(rep.max_projection_distance, d);
        if (d > net.eta) rep.dense = false;
    }
    return rep;
}

inline NetReport verify_net_sampled(const Net& net, uint64_t seed, size_t count) {
    Rng rng(mix_seed(seed, 0xde5eULL));
    std::vector<Point> pts;
    pts.reserve(count);
    for (size_t i = 0; i < count; ++i)
        pts.push_back(sample_in_ball(rng, net.ball.space, net.ball.center, net.ball.radius));
    return verify_net(net, pts);
}

inline void save_net(const Net& net, std::ostream& out) {
    out << "# eta-net v1\n";
    out << "m " << net.ball.space.dim << "\n";
    out << "norm " << norm_name(net.ball.space.norm) << "\n";
    out << "radius ";
    out.precision(17);
    out << net.ball.radius << "\n";
    out << "center";
    for (double c : net.ball.center) out << " " << c;
    out << "\n";
    out << "eta " << net.eta << "\n";
    out << "size " << net.points.size() << "\n";
    for (const Point& p : net.points) {
        out << "p";
        for (double c : p) out << " " << c;
        out << "\n";
    }
}

inline Net load_net(std::istream& in) {
    std::string line, key;
    int m = 0;
    Norm norm = Norm::L2;
    double radius = 0.0, eta = 0.0;
    Point center;
    size_t size = 0;
    std::vector<Point> pts;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        ss >> key;
        if (key == "m") ss >> m;
        else if (key == "norm") {
            std::string s;
            ss >> s;
            norm = norm_from_name(s);
        } else if (key == "radius") ss >> radius;
        else if (key == "center") {
            double v;
            while (ss >> v) center.push_back(v);
        } else if (key == "eta") ss >> eta;
        else if (key == "size") ss >> size;
        else if (key == "p") {
            Point p;
            double v;
            while (ss >> v) p.push_back(v);
            if (static_cast<int>(p.size()) != m) throw std::runtime_error("load_net: bad point line");
            pts.push_back(std::move(p));
        }
    }
    if (pts.size() != size) throw std::runtime_error("load_net: size header mismatch");
    return make_net_from_points(Ball(NormedSpace(m, norm), center, radius), eta, std::move(pts));
}

}  // namespace smoothbench
