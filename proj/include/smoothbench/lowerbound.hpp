#pragma once

// The hypercube lower-bound experiment: furthest-in-future offline strategy
// on near-vertex instances and the ratio table over k.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "smoothbench/hypercube.hpp"
#include "smoothbench/metric.hpp"
#include "smoothbench/offline.hpp"
#include "smoothbench/problems.hpp"
#include "smoothbench/smoothing.hpp"

namespace smoothbench {

struct FfdResult {
    double cost = 0.0;
    std::vector<int> decisions;
};

namespace detail {

inline int next_occurrence(const std::vector<std::vector<int>>& occ, int vertex, int after) {
    const auto& times = occ[vertex];
    const auto it = std::upper_bound(times.begin(), times.end(), after);
    return (it == times.end()) ? std::numeric_limits<int>::max() : *it;
}

// Victim choice shared by the server and taxi variants: the candidate whose
// vertex is requested furthest in the future; ties go to the lowest vertex
// index.
inline int pick_eviction(const std::vector<int>& assigned_vertex,
                         const std::vector<std::vector<int>>& occ, int t) {
    int victim = -1;
    long long victim_next = -1;
    int victim_vertex = std::numeric_limits<int>::max();
    for (size_t sid = 0; sid < assigned_vertex.size(); ++sid) {
        const int v = assigned_vertex[sid];
        const long long nxt = next_occurrence(occ, v, t);
        if (nxt > victim_next || (nxt == victim_next && v < victim_vertex)) {
            victim = static_cast<int>(sid);
            victim_next = nxt;
            victim_vertex = v;
        }
    }
    return victim;
}

}  // namespace detail

// Offline strategy for the hypercube instances: keep servers parked near
// distinct vertices, serve in-cube requests with the local server (at most
// eps per request), and on a miss evict the server whose vertex is requested
// furthest in the future. The returned cost upper-bounds the offline
// optimum.
inline FfdResult offline_ffd_strategy(const HypercubeInstance& inst, Problem problem,
                                      const Configuration& initial,
                                      const std::vector<Request>& requests) {
    const NormedSpace space = inst.space();
    const int T = static_cast<int>(requests.size());
    FfdResult res;
    res.decisions.reserve(T);

    for (const auto& req : requests)
        for (const auto& p : req.points)
            if (!inst.in_near_set(p))
                throw std::invalid_argument("offline_ffd_strategy: request point outside the near set");

    if (problem == Problem::KServer || problem == Problem::KTaxi) {
        const int k = static_cast<int>(initial.size());
        std::vector<int> assigned(k);
        std::vector<int> owner(inst.k + 1, -1);
        for (int sid = 0; sid < k; ++sid) {
            assigned[sid] = inst.vertex_of(initial[sid]);
            owner[assigned[sid]] = sid;
        }
        std::vector<std::vector<int>> occ(inst.k + 1);
        for (int t = 0; t < T; ++t) occ[inst.vertex_of(requests[t].points[0])].push_back(t);

        Configuration config = initial;
        for (int t = 0; t < T; ++t) {
            const Point& target = requests[t].points[0];
            const int v = inst.vertex_of(target);
            int sid = owner[v];
            if (sid < 0) {
                sid = detail::pick_eviction(assigned, occ, t);
                owner[assigned[sid]] = -1;
                assigned[sid] = v;
                owner[v] = sid;
            }
            if (problem == Problem::KServer) {
                res.cost += serve_kserver(space, config, sid, target);
            } else {
                res.cost += serve_ktaxi(space, config, sid, requests[t].points[0], requests[t].points[1]);
            }
            res.decisions.push_back(sid);
        }
        return res;
    }

    // Chasing: the server camps near one vertex; when that vertex is the far
    // one it relocates to the vertex whose next far-step lies furthest in
    // the future.
    std::vector<int> far_vertex(T);
    std::vector<std::vector<int>> far_occ(inst.k + 1);
    for (int t = 0; t < T; ++t) {
        std::vector<char> present(inst.k + 1, 0);
        for (const auto& p : requests[t].points) present[inst.vertex_of(p)] = 1;
        int far = -1;
        for (int v = 0; v <= inst.k; ++v)
            if (!present[v]) {
                far = v;
                break;
            }
        if (far < 0) throw std::invalid_argument("offline_ffd_strategy: request set has no far vertex");
        far_vertex[t] = far;
        far_occ[far].push_back(t);
    }

    Configuration config = initial;
    int camp = inst.vertex_of(initial[0]);
    for (int t = 0; t < T; ++t) {
        int target_vertex = camp;
        if (camp == far_vertex[t]) {
            long long best_next = -1;
            int best_v = -1;
            for (int v = 0; v <= inst.k; ++v) {
                if (v == far_vertex[t]) continue;
                const long long nxt = detail::next_occurrence(far_occ, v, t);
                if (nxt > best_next || (nxt == best_next && v < best_v)) {
                    best_next = nxt;
                    best_v = v;
                }
            }
            target_vertex = best_v;
        }
        int choice = -1;
        for (size_t j = 0; j < requests[t].points.size(); ++j) {
            if (inst.vertex_of(requests[t].points[j]) == target_vertex) {
                choice = static_cast<int>(j);
                break;
            }
        }
        res.cost += serve_chase(space, config, choice, requests[t]);
        res.decisions.push_back(choice);
        camp = target_vertex;
    }
    return res;
}

struct LbRow {
    Problem problem = Problem::KServer;
    int k = 0;
    uint64_t seed = 0;
    std::string algorithm;
    double sigma = 0.0;
    double epsilon = 0.0;
    int m = 0;
    int vertex_count = 0;
    size_t T = 0;
    double online_cost = 0.0;
    double offline_cost = 0.0;   // exact OPT when available, else the FFD bound
    std::string opt_kind;        // "exact" or "upper_bound"
    double ffd_cost = 0.0;       // always reported
    double ratio = 0.0;
    double eta = 0.0;            // net parameters when a wrapped algorithm ran
    size_t net_size = 0;
};

}  // namespace smoothbench
