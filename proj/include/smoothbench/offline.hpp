#pragma once

// Exact offline optimum oracles. k-server and k-taxi reduce to min-cost
// flow over request chains with a forcing charge that makes every request
// carry one unit of throughput; chasing is a dynamic program over chosen
// points. Reported costs are recomputed from the returned decisions in
// double arithmetic, so the int64 scaling inside the solver never leaks
// into oracle comparisons.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "smoothbench/metric.hpp"
#include "smoothbench/min_cost_flow.hpp"
#include "smoothbench/net.hpp"
#include "smoothbench/problems.hpp"

namespace smoothbench {

struct OfflineSolution {
    double cost = 0.0;
    std::vector<int> decisions;
};

namespace detail {

constexpr double kFlowScale = 1e9;

inline int64_t scaled(double d) { return static_cast<int64_t>(std::llround(d * kFlowScale)); }

// Shared chain construction: `entry_cost(i, j)` prices server/taxi i picking
// request j first, `chain_cost(j, l)` prices serving l right after j.
template <typename EntryCost, typename ChainCost>
std::vector<int> solve_chain_assignment(int k, int T, EntryCost entry_cost, ChainCost chain_cost,
                                        double max_dist) {
    // Nodes: 0 = source, 1 = sink, 2..2+k-1 = servers, then per request an
    // in/out pair.
    const int s = 0, t = 1;
    const auto server_node = [](int i) { return 2 + i; };
    const auto req_in = [k](int j) { return 2 + k + 2 * j; };
    const auto req_out = [k](int j) { return 2 + k + 2 * j + 1; };
    MinCostFlow flow(2 + k + 2 * T);
    const int64_t forcing = scaled(max_dist * (T + k + 2) + 1.0);

    std::vector<std::vector<int>> entry_edges(k);
    std::vector<std::vector<int>> chain_edges(T);
    for (int i = 0; i < k; ++i) {
        flow.add_edge(s, server_node(i), 1, 0);
        flow.add_edge(server_node(i), t, 1, 0);
        entry_edges[i].resize(T);
        for (int j = 0; j < T; ++j)
            entry_edges[i][j] = flow.add_edge(server_node(i), req_in(j), 1, scaled(entry_cost(i, j)));
    }
    for (int j = 0; j < T; ++j) {
        flow.add_edge(req_in(j), req_out(j), 1, -forcing);
        flow.add_edge(req_out(j), t, 1, 0);
        chain_edges[j].assign(T, -1);
        for (int l = j + 1; l < T; ++l)
            chain_edges[j][l] = flow.add_edge(req_out(j), req_in(l), 1, scaled(chain_cost(j, l)));
    }

    // Exact shortest distances in the initial DAG seed the solver's
    // potentials, so every augmentation runs Dijkstra on reduced costs.
    std::vector<int64_t> pot(2 + k + 2 * T, 0);
    std::vector<int64_t> out_pot(T);
    for (int j = 0; j < T; ++j) {
        int64_t best = std::numeric_limits<int64_t>::max();
        for (int i = 0; i < k; ++i) best = std::min(best, scaled(entry_cost(i, j)));
        for (int l = 0; l < j; ++l) best = std::min(best, out_pot[l] + scaled(chain_cost(l, j)));
        pot[req_in(j)] = best;
        out_pot[j] = best - forcing;
        pot[req_out(j)] = out_pot[j];
    }
    pot[t] = 0;
    for (int j = 0; j < T; ++j) pot[t] = std::min(pot[t], out_pot[j]);

    const auto [sent, cost] = flow.solve(s, t, k, &pot);
    (void)cost;
    if (sent != k) throw std::runtime_error("offline flow: could not route all servers");

    std::vector<int> decisions(T, -1);
    for (int i = 0; i < k; ++i) {
        int j = -1;
        for (int cand = 0; cand < T; ++cand) {
            if (flow.flow_on(entry_edges[i][cand]) > 0) {
                j = cand;
                break;
            }
        }
        while (j >= 0) {
            decisions[j] = i;
            int next = -1;
            for (int l = j + 1; l < T; ++l) {
                if (chain_edges[j][l] >= 0 && flow.flow_on(chain_edges[j][l]) > 0) {
                    next = l;
                    break;
                }
            }
            j = next;
        }
    }
    for (int j = 0; j < T; ++j) {
        if (decisions[j] < 0) throw std::runtime_error("offline flow: request left unserved");
    }
    return decisions;
}

}  // namespace detail

// Exact minimum total movement for k-server.
inline OfflineSolution opt_kserver(const NormedSpace& space, const Configuration& initial,
                                   const std::vector<Point>& requests) {
    const int k = static_cast<int>(initial.size());
    const int T = static_cast<int>(requests.size());
    if (T < 1) throw std::invalid_argument("opt_kserver: need at least one request");
    double dmax = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < T; ++j) dmax = std::max(dmax, distance(space, initial[i], requests[j]));
    for (int j = 0; j < T; ++j)
        for (int l = j + 1; l < T; ++l) dmax = std::max(dmax, distance(space, requests[j], requests[l]));

    OfflineSolution sol;
    sol.decisions = detail::solve_chain_assignment(
        k, T, [&](int i, int j) { return distance(space, initial[i], requests[j]); },
        [&](int j, int l) { return distance(space, requests[j], requests[l]); }, dmax);
    Configuration config = initial;
    for (int t = 0; t < T; ++t) sol.cost += serve_kserver(space, config, sol.decisions[t], requests[t]);
    return sol;
}

// Exact minimum empty-run cost for k-taxi.
inline OfflineSolution opt_ktaxi(const NormedSpace& space, const Configuration& initial,
                                 const std::vector<Request>& requests) {
    const int k = static_cast<int>(initial.size());
    const int T = static_cast<int>(requests.size());
    if (T < 1) throw std::invalid_argument("opt_ktaxi: need at least one request");
    double dmax = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < T; ++j)
            dmax = std::max(dmax, distance(space, initial[i], requests[j].points[0]));
    for (int j = 0; j < T; ++j)
        for (int l = j + 1; l < T; ++l)
            dmax = std::max(dmax, distance(space, requests[j].points[1], requests[l].points[0]));

    OfflineSolution sol;
    sol.decisions = detail::solve_chain_assignment(
        k, T, [&](int i, int j) { return distance(space, initial[i], requests[j].points[0]); },
        [&](int j, int l) { return distance(space, requests[j].points[1], requests[l].points[0]); },
        dmax);
    Configuration config = initial;
    for (int t = 0; t < T; ++t)
        sol.cost += serve_ktaxi(space, config, sol.decisions[t], requests[t].points[0],
                                requests[t].points[1]);
    return sol;
}

// Exact optimum for chasing small sets by DP over chosen request points.
inline OfflineSolution opt_chasing(const NormedSpace& space, const Point& initial,
                                   const std::vector<Request>& requests) {
    const int T = static_cast<int>(requests.size());
    if (T < 1) throw std::invalid_argument("opt_chasing: need at least one request");
    for (const auto& r : requests)
        if (r.points.empty()) throw std::invalid_argument("opt_chasing: empty request set");

    std::vector<std::vector<double>> dp(T);
    std::vector<std::vector<int>> parent(T);
    dp[0].resize(requests[0].points.size());
    parent[0].assign(requests[0].points.size(), -1);
    for (size_t j = 0; j < requests[0].points.size(); ++j)
        dp[0][j] = distance(space, initial, requests[0].points[j]);
    for (int t = 1; t < T; ++t) {
        const auto& prev = requests[t - 1].points;
        const auto& cur = requests[t].points;
        dp[t].resize(cur.size());
        parent[t].resize(cur.size());
        for (size_t j = 0; j < cur.size(); ++j) {
            double best = std::numeric_limits<double>::infinity();
            int arg = -1;
            for (size_t i = 0; i < prev.size(); ++i) {
                const double v = dp[t - 1][i] + distance(space, prev[i], cur[j]);
                if (v < best) {
                    best = v;
                    arg = static_cast<int>(i);
                }
            }
            dp[t][j] = best;
            parent[t][j] = arg;
        }
    }
    double best = std::numeric_limits<double>::infinity();
    int arg = -1;
    for (size_t j = 0; j < dp[T - 1].size(); ++j) {
        if (dp[T - 1][j] < best) {
            best = dp[T - 1][j];
            arg = static_cast<int>(j);
        }
    }
    OfflineSolution sol;
    sol.decisions.assign(T, -1);
    for (int t = T - 1; t >= 0; --t) {
        sol.decisions[t] = arg;
        arg = parent[t][arg];
    }
    Configuration config{initial};
    for (int t = 0; t < T; ++t) sol.cost += serve_chase(space, config, sol.decisions[t], requests[t]);
    return sol;
}

struct ProjectedOptReport {
    double opt_m_cost = 0.0;
    double shadow_cost = 0.0;
    double opt_n_cost = 0.0;
    double detour_budget = 0.0;  // 2 * eta * T
    bool shadow_within_budget = false;  // shadow <= opt_M + 2*eta*T
    bool opt_n_le_shadow = false;
};

// Replays OPT_M's decisions with every position projected onto the net (the
// "shadow" schedule on N) and compares against the exact optimum of the
// projected instance.
inline ProjectedOptReport opt_projected_vs_original(Problem problem, const NormedSpace& space,
                                                    const Configuration& initial,
                                                    const std::vector<Request>& requests,
                                                    const OfflineSolution& opt_m, const Net& net,
                                                    double tol = 1e-9) {
    const int T = static_cast<int>(requests.size());
    ProjectedOptReport rep;
    rep.opt_m_cost = opt_m.cost;
    rep.detour_budget = 2.0 * net.eta * T;

    const auto proj = [&](const Point& p) { return net.points[project(net, p)]; };

    Configuration shadow;
    for (const auto& p : initial) shadow.push_back(proj(p));
    Configuration shadow_initial = shadow;

    std::vector<Request> projected;
    projected.reserve(T);
    for (const auto& req : requests) {
        Request pr;
        pr.problem = req.problem;
        for (const auto& p : req.points) pr.points.push_back(proj(p));
        projected.push_back(std::move(pr));
    }

    Configuration real = initial;
    for (int t = 0; t < T; ++t) {
        const int dec = opt_m.decisions[t];
        switch (problem) {
            case Problem::KServer:
                rep.shadow_cost += serve_kserver(space, shadow, dec, projected[t].points[0]);
                serve_kserver(space, real, dec, requests[t].points[0]);
                break;
            case Problem::KTaxi:
                rep.shadow_cost += serve_ktaxi(space, shadow, dec, projected[t].points[0],
                                               projected[t].points[1]);
                serve_ktaxi(space, real, dec, requests[t].points[0], requests[t].points[1]);
                break;
            case Problem::Chasing:
                rep.shadow_cost += serve_chase(space, shadow, dec, projected[t]);
                serve_chase(space, real, dec, requests[t]);
                break;
        }
    }

    switch (problem) {
        case Problem::KServer: {
            std::vector<Point> pts;
            for (const auto& r : projected) pts.push_back(r.points[0]);
            rep.opt_n_cost = opt_kserver(space, shadow_initial, pts).cost;
            break;
        }
        case Problem::KTaxi:
            rep.opt_n_cost = opt_ktaxi(space, shadow_initial, projected).cost;
            break;
        case Problem::Chasing:
            rep.opt_n_cost = opt_chasing(space, shadow_initial[0], projected).cost;
            break;
    }

    rep.shadow_within_budget = rep.shadow_cost <= rep.opt_m_cost + rep.detour_budget + tol;
    rep.opt_n_le_shadow = rep.opt_n_cost <= rep.shadow_cost + tol;
    return rep;
}

}  // namespace smoothbench
