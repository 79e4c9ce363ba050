#pragma once

// Problem semantics for k-server, k-taxi and chasing small sets:
// configurations, legal service of one request, exact cost accounting,
// and a replayable trace format.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "smoothbench/metric.hpp"

namespace smoothbench {

enum class Problem { KServer, KTaxi, Chasing };

inline const char* problem_name(Problem p) {
    switch (p) {
        case Problem::KServer: return "kserver";
        case Problem::KTaxi: return "ktaxi";
        case Problem::Chasing: return "chasing";
    }
    return "?";
}

inline Problem problem_from_name(const std::string& s) {
    if (s == "kserver") return Problem::KServer;
    if (s == "ktaxi") return Problem::KTaxi;
    if (s == "chasing") return Problem::Chasing;
    throw std::invalid_argument("unknown problem: " + s);
}

// One request. KServer uses points[0]; KTaxi uses points[0] = pickup a_t and
// points[1] = dropoff b_t; Chasing uses the whole list (size <= k).
struct Request {
    Problem problem = Problem::KServer;
    std::vector<Point> points;

    static Request server(Point r) { return Request{Problem::KServer, {std::move(r)}}; }
    static Request taxi(Point a, Point b) { return Request{Problem::KTaxi, {std::move(a), std::move(b)}}; }
    static Request chase(std::vector<Point> pts) { return Request{Problem::Chasing, std::move(pts)}; }
};

// Server/taxi positions indexed by id; a single point for chasing.
using Configuration = std::vector<Point>;

struct StepRecord {
    size_t step = 0;
    double movement_cost = 0.0;  // costed movement this step (empty-run cost for taxis)
    double detour_cost = 0.0;    // portion attributable to projection detours
    int mover = -1;              // server/taxi id, or request-set index for chasing
};

struct CostLedger {
    std::vector<StepRecord> records;
    double initial_cost = 0.0;  // cost paid before the first request (e.g. projecting C_0)

    double total() const {
        double t = initial_cost;
        for (const auto& r : records) t += r.movement_cost;
        return t;
    }
    double total_detour() const {
        double t = 0.0;
        for (const auto& r : records) t += r.detour_cost;
        return t;
    }
    // Total over records with step index >= burn_in (initial cost counts
    // toward the discarded prefix unless burn_in is zero).
    double total_after(size_t burn_in) const {
        double t = (burn_in == 0) ? initial_cost : 0.0;
        for (const auto& r : records)
            if (r.step >= burn_in) t += r.movement_cost;
        return t;
    }
};

// Move server `server_id` to r; returns movement cost.
inline double serve_kserver(const NormedSpace& space, Configuration& config, int server_id,
                            const Point& r) {
    if (server_id < 0 || server_id >= static_cast<int>(config.size()))
        throw std::invalid_argument("serve_kserver: invalid server id");
    const double cost = distance(space, config[server_id], r);
    config[server_id] = r;
    return cost;
}

// Taxi `taxi_id` drives empty to a (costed), carries the ride a->b (free),
// and is left at b. Returns the empty-run cost.
inline double serve_ktaxi(const NormedSpace& space, Configuration& config, int taxi_id,
                          const Point& a, const Point& b) {
    if (taxi_id < 0 || taxi_id >= static_cast<int>(config.size()))
        throw std::invalid_argument("serve_ktaxi: invalid taxi id");
    const double empty_cost = distance(space, config[taxi_id], a);
    config[taxi_id] = b;
    return empty_cost;
}

// Move the single chasing server to request point `choice`.
inline double serve_chase(const NormedSpace& space, Configuration& config, int choice,
                          const Request& req) {
    if (config.size() != 1) throw std::invalid_argument("serve_chase: configuration must hold one point");
    if (choice < 0 || choice >= static_cast<int>(req.points.size()))
        throw std::invalid_argument("serve_chase: choice out of range");
    const double cost = distance(space, config[0], req.points[choice]);
    config[0] = req.points[choice];
    return cost;
}

struct Trace {
    Problem problem = Problem::KServer;
    NormedSpace space;
    Ball ball;
    uint64_t seed = 0;
    Configuration initial_config;
    std::vector<Request> requests;
    std::vector<int> decisions;
    std::vector<double> step_costs;

    bool has_opt = false;
    double opt_cost = 0.0;
    std::vector<int> opt_decisions;
};

// Replays `decisions` against `requests` and checks that every request is
// legally served and that every recorded step cost matches the recomputed
// one. Returns false on any violation.
inline bool validate_trace(const Trace& trace, double tol = 1e-9) {
    if (trace.requests.size() != trace.decisions.size()) return false;
    if (trace.requests.size() != trace.step_costs.size()) return false;
    Configuration config = trace.initial_config;
    for (size_t t = 0; t < trace.requests.size(); ++t) {
        const Request& req = trace.requests[t];
        if (req.problem != trace.problem) return false;
        const int dec = trace.decisions[t];
        double cost = 0.0;
        try {
            switch (trace.problem) {
                case Problem::KServer:
                    cost = serve_kserver(trace.space, config, dec, req.points[0]);
                    break;
                case Problem::KTaxi:
                    cost = serve_ktaxi(trace.space, config, dec, req.points[0], req.points[1]);
                    break;
                case Problem::Chasing:
                    cost = serve_chase(trace.space, config, dec, req);
                    break;
            }
        } catch (const std::exception&) {
            return false;
        }
        if (std::abs(cost - trace.step_costs[t]) > tol) return false;
    }
    return true;
}

inline double trace_total_cost(const Trace& trace) {
    double t = 0.0;
    for (double c : trace.step_costs) t += c;
    return t;
}

namespace detail {
inline void write_point(std::ostream& out, const Point& p) {
    for (size_t i = 0; i < p.size(); ++i) out << (i ? " " : "") << p[i];
}
}  // namespace detail

inline void save_trace(const Trace& trace, std::ostream& out) {
    out.precision(17);
    out << "# trace v1\n";
    out << "problem " << problem_name(trace.problem) << "\n";
    out << "k " << trace.initial_config.size() << "\n";
    out << "m " << trace.space.dim << "\n";
    out << "norm " << norm_name(trace.space.norm) << "\n";
    out << "radius " << trace.ball.radius << "\n";
    out << "center";
    for (double c : trace.ball.center) out << " " << c;
    out << "\n";
    out << "seed " << trace.seed << "\n";
    for (const Point& p : trace.initial_config) {
        out << "init ";
        detail::write_point(out, p);
        out << "\n";
    }
    out << "steps " << trace.requests.size() << "\n";
    for (size_t t = 0; t < trace.requests.size(); ++t) {
        out << "t " << t << " req ";
        const auto& pts = trace.requests[t].points;
        for (size_t i = 0; i < pts.size(); ++i) {
            if (i) out << " | ";
            detail::write_point(out, pts[i]);
        }
        out << " dec " << trace.decisions[t] << " cost " << trace.step_costs[t] << "\n";
    }
    if (trace.has_opt) {
        out << "opt_cost " << trace.opt_cost << "\n";
        out << "opt_dec";
        for (int d : trace.opt_decisions) out << " " << d;
        out << "\n";
    }
}

inline Trace load_trace(std::istream& in) {
    Trace trace;
    std::string line, key;
    int m = 1;
    Norm norm = Norm::L2;
    double radius = 1.0;
    Point center;
    size_t k = 0, steps = 0;
    std::vector<Point> init;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        ss >> key;
        if (key == "problem") {
            std::string s;
            ss >> s;
            trace.problem = problem_from_name(s);
        } else if (key == "k") ss >> k;
        else if (key == "m") ss >> m;
        else if (key == "norm") {
            std::string s;
            ss >> s;
            norm = norm_from_name(s);
        } else if (key == "radius") ss >> radius;
        else if (key == "center") {
            double v;
            while (ss >> v) center.push_back(v);
        } else if (key == "seed") ss >> trace.seed;
        else if (key == "init") {
            Point p;
            double v;
            while (ss >> v) p.push_back(v);
            init.push_back(std::move(p));
        } else if (key == "steps") ss >> steps;
        else if (key == "t") {
            size_t idx;
            std::string tok;
            ss >> idx >> tok;  // "req"
            Request req;
            req.problem = trace.problem;
            Point cur;
            while (ss >> tok) {
                if (tok == "|") {
                    req.points.push_back(cur);
                    cur.clear();
                } else if (tok == "dec") {
                    break;
                } else {
                    cur.push_back(std::stod(tok));
                }
            }
            if (!cur.empty()) req.points.push_back(cur);
            int dec;
            double cost;
            ss >> dec >> tok >> cost;  // dec value, "cost", value
            trace.requests.push_back(std::move(req));
            trace.decisions.push_back(dec);
            trace.step_costs.push_back(cost);
        } else if (key == "opt_cost") {
            ss >> trace.opt_cost;
            trace.has_opt = true;
        } else if (key == "opt_dec") {
            int d;
            while (ss >> d) trace.opt_decisions.push_back(d);
        }
    }
    trace.space = NormedSpace(m, norm);
    if (center.empty()) center.assign(m, 0.0);
    trace.ball = Ball(trace.space, center, radius);
    trace.initial_config = std::move(init);
    if (trace.requests.size() != steps) throw std::runtime_error("load_trace: step count mismatch");
    if (trace.initial_config.size() != k) throw std::runtime_error("load_trace: init config mismatch");
    return trace;
}

}  // namespace smoothbench
