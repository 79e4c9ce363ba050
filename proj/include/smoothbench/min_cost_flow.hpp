#pragma once

// Successive-shortest-path min-cost flow on int64 costs with Johnson
// potentials: Dijkstra on reduced costs once valid potentials are known.
// Callers whose graphs contain negative arcs either supply initial
// potentials (the chain constructions know theirs exactly) or fall back to
// one SPFA pass to bootstrap them.

#include <cstdint>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace smoothbench {

class MinCostFlow {
public:
    explicit MinCostFlow(int node_count) : adj_(node_count) {}

    // Returns the forward edge id; edge id ^ 1 is the residual edge.
    int add_edge(int from, int to, int64_t cap, int64_t cost) {
        const int id = static_cast<int>(edges_.size());
        edges_.push_back({to, cap, cost});
        edges_.push_back({from, 0, -cost});
        adj_[from].push_back(id);
        adj_[to].push_back(id + 1);
        if (cost < 0) has_negative_ = true;
        return id;
    }

    int64_t flow_on(int edge_id) const { return edges_[edge_id + 1].cap; }

    // Sends up to max_flow units s->t; returns (flow, cost). When
    // `initial_potentials` is given it must make every reduced cost
    // nonnegative (e.g. exact shortest distances in the initial graph).
    std::pair<int64_t, int64_t> solve(int s, int t, int64_t max_flow,
                                      const std::vector<int64_t>* initial_potentials = nullptr) {
        const int n = static_cast<int>(adj_.size());
        const int64_t inf = std::numeric_limits<int64_t>::max();
        std::vector<int64_t> pot(n, 0);
        bool pot_valid = !has_negative_;
        if (initial_potentials) {
            if (static_cast<int>(initial_potentials->size()) != n)
                throw std::invalid_argument("min cost flow: bad potential vector size");
            pot = *initial_potentials;
            pot_valid = true;
        }

        std::vector<int64_t> dist(n);
        std::vector<int> prev_edge(n);
        int64_t flow = 0, cost = 0;
        while (flow < max_flow) {
            std::fill(dist.begin(), dist.end(), inf);
            std::fill(prev_edge.begin(), prev_edge.end(), -1);
            if (pot_valid)
                dijkstra(s, dist, prev_edge, pot);
            else
                spfa(s, dist, prev_edge);
            if (dist[t] == inf) break;

            if (pot_valid) {
                for (int v = 0; v < n; ++v)
                    pot[v] += (dist[v] < inf) ? dist[v] : dist[t];
            } else {
                for (int v = 0; v < n; ++v) pot[v] = (dist[v] < inf) ? dist[v] : dist[t];
                pot_valid = true;
            }

            int64_t push = max_flow - flow;
            for (int v = t; v != s;) {
                push = std::min(push, edges_[prev_edge[v]].cap);
                v = edges_[prev_edge[v] ^ 1].to;
            }
            for (int v = t; v != s;) {
                Edge& e = edges_[prev_edge[v]];
                e.cap -= push;
                edges_[prev_edge[v] ^ 1].cap += push;
                cost += push * e.cost;
                v = edges_[prev_edge[v] ^ 1].to;
            }
            flow += push;
        }
        return {flow, cost};
    }

private:
    struct Edge {
        int to;
        int64_t cap;
        int64_t cost;
    };

    void dijkstra(int s, std::vector<int64_t>& dist, std::vector<int>& prev_edge,
                  const std::vector<int64_t>& pot) const {
        using Entry = std::pair<int64_t, int>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
        dist[s] = 0;
        heap.emplace(0, s);
        while (!heap.empty()) {
            const auto [d, u] = heap.top();
            heap.pop();
            if (d != dist[u]) continue;
            for (int id : adj_[u]) {
                const Edge& e = edges_[id];
                if (e.cap <= 0) continue;
                const int64_t nd = d + e.cost + pot[u] - pot[e.to];
                if (nd < dist[e.to]) {
                    dist[e.to] = nd;
                    prev_edge[e.to] = id;
                    heap.emplace(nd, e.to);
                }
            }
        }
    }

    void spfa(int s, std::vector<int64_t>& dist, std::vector<int>& prev_edge) const {
        std::vector<char> in_queue(adj_.size(), 0);
        std::deque<int> queue{s};
        dist[s] = 0;
        in_queue[s] = 1;
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            in_queue[u] = 0;
            for (int id : adj_[u]) {
                const Edge& e = edges_[id];
                if (e.cap <= 0) continue;
                const int64_t nd = dist[u] + e.cost;
                if (nd < dist[e.to]) {
                    dist[e.to] = nd;
                    prev_edge[e.to] = id;
                    if (!in_queue[e.to]) {
                        in_queue[e.to] = 1;
                        queue.push_back(e.to);
                    }
                }
            }
        }
    }

    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adj_;
    bool has_negative_ = false;
};

}  // namespace smoothbench
