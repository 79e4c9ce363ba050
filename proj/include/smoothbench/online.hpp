#pragma once

// Online algorithms over the finite net metric (the A_N slot), the
// projection wrapper that lifts them back to the ball, and the sigma grid
// for running several wrapped instances in parallel.

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "smoothbench/matching.hpp"
#include "smoothbench/metric.hpp"
#include "smoothbench/net.hpp"
#include "smoothbench/problems.hpp"
#include "smoothbench/rng.hpp"
#include "smoothbench/smoothing.hpp"

namespace smoothbench {

// An online algorithm over net point ids. step() consumes a projected
// request (ids into the net) and returns (decision, movement cost), where
// the decision is a server/taxi id, or an index into the request set for
// chasing.
class FiniteOnlineAlgorithm {
public:
    virtual ~FiniteOnlineAlgorithm() = default;
    virtual Problem problem() const = 0;
    virtual const std::vector<int>& config_ids() const = 0;
    virtual std::pair<int, double> step(const std::vector<int>& request_ids) = 0;
    virtual std::string name() const = 0;
};

namespace detail {

class NetMetric {
public:
    explicit NetMetric(const Net& net) : net_(&net) {
        const size_t n = net.points.size();
        if (n <= 1500) {
            matrix_.assign(n * n, 0.0);
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j < n; ++j)
                    matrix_[i * n + j] = distance(net.ball.space, net.points[i], net.points[j]);
        }
    }

    double operator()(int i, int j) const {
        if (!matrix_.empty()) return matrix_[static_cast<size_t>(i) * net_->points.size() + j];
        return distance(net_->ball.space, net_->points[i], net_->points[j]);
    }

    size_t size() const { return net_->points.size(); }

private:
    const Net* net_;
    std::vector<double> matrix_;
};

// Sorted multisets of `k` ids over [0, n), indexable both ways.
class MultisetIndex {
public:
    MultisetIndex(int n, int k, size_t guard = 1'000'000) : n_(n), k_(k) {
        double count = 1.0;
        for (int i = 1; i <= k; ++i) count = count * (n + i - 1) / i;
        if (count > static_cast<double>(guard))
            throw std::runtime_error("work function table: configuration count exceeds guard");
        bits_ = std::max(1, static_cast<int>(std::bit_width(static_cast<unsigned>(std::max(1, n_ - 1)))));
        if (k_ > 0 && bits_ * k_ > 64)
            throw std::runtime_error("work function table: configuration id does not pack into 64 bits");
        std::vector<int> cur(k, 0);
        enumerate(cur, 0, 0);
    }

    size_t count() const { return sets_.size(); }
    const std::vector<int>& at(size_t idx) const { return sets_[idx]; }

    size_t index_of(const std::vector<int>& sorted_ids) const {
        const auto it = lookup_.find(pack(sorted_ids));
        if (it == lookup_.end()) throw std::logic_error("multiset index: unknown configuration");
        return it->second;
    }

    // Index of (multiset at idx) with the element at position `pos` replaced
    // by `value`; scratch avoids reallocation.
    size_t replace(size_t idx, int pos, int value, std::vector<int>& scratch) const {
        scratch = sets_[idx];
        scratch.erase(scratch.begin() + pos);
        scratch.insert(std::lower_bound(scratch.begin(), scratch.end(), value), value);
        return index_of(scratch);
    }

private:
    void enumerate(std::vector<int>& cur, int depth, int lo) {
        if (depth == k_) {
            lookup_.emplace(pack(cur), sets_.size());
            sets_.push_back(cur);
            return;
        }
        for (int v = lo; v < n_; ++v) {
            cur[depth] = v;
            enumerate(cur, depth + 1, v);
        }
    }

    uint64_t pack(const std::vector<int>& ids) const {
        uint64_t key = 0;
        for (int id : ids) key = (key << bits_) | static_cast<uint64_t>(id);
        return key;
    }

    int n_, k_, bits_ = 1;
    std::vector<std::vector<int>> sets_;
    std::unordered_map<uint64_t, size_t> lookup_;
};

}  // namespace detail

// Work function algorithm for k-server on the net metric. The table w is
// kept over all sorted multisets of k net ids; the update is
//   w_t(C) = min_{x in C} [ w_{t-1}(C - x + r) + d(x, r) ]
// and the move minimizes w_t(C') + d(current, C') over serving C'.
class WfaKServer : public FiniteOnlineAlgorithm {
public:
    WfaKServer(const Net& net, std::vector<int> initial_ids, size_t state_guard = 1'000'000)
        : metric_(net),
          k_(static_cast<int>(initial_ids.size())),
          states_(static_cast<int>(net.points.size()), static_cast<int>(initial_ids.size()),
                  state_guard),
          cur_(std::move(initial_ids)) {
        w_.resize(states_.count());
        std::vector<int> init = cur_;
        std::sort(init.begin(), init.end());
        // w_0(C) = matching distance between C and the initial multiset.
        for (size_t s = 0; s < states_.count(); ++s) w_[s] = matching_cost(init, states_.at(s));
    }

    Problem problem() const override { return Problem::KServer; }
    const std::vector<int>& config_ids() const override { return cur_; }
    std::string name() const override { return "wfa"; }
    const std::vector<double>& work_function() const { return w_; }
    const detail::MultisetIndex& state_index() const { return states_; }

    std::pair<int, double> step(const std::vector<int>& request_ids) override {
        const int q = request_ids.at(0);
        if (q < 0 || q >= static_cast<int>(metric_.size()))
            throw std::invalid_argument("wfa_step: request point not in net");
        std::vector<double> next(states_.count());
        std::vector<int> scratch;
        for (size_t s = 0; s < states_.count(); ++s) {
            const auto& C = states_.at(s);
            double best = std::numeric_limits<double>::infinity();
            for (int pos = 0; pos < k_; ++pos) {
                if (pos > 0 && C[pos] == C[pos - 1]) continue;
                const size_t s2 = states_.replace(s, pos, q, scratch);
                best = std::min(best, w_[s2] + metric_(C[pos], q));
            }
            next[s] = best;
        }
        w_ = std::move(next);

        // Choose the serving move: prefer lower value, then shorter move,
        // then lower server id.
        std::vector<int> sorted = cur_;
        std::sort(sorted.begin(), sorted.end());
        const size_t cur_idx = states_.index_of(sorted);
        std::vector<double> vals(k_), dists(k_);
        for (int sid = 0; sid < k_; ++sid) {
            const int x = cur_[sid];
            const int pos = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), x) -
                                             sorted.begin());
            const size_t s2 = states_.replace(cur_idx, pos, q, scratch);
            dists[sid] = metric_(x, q);
            vals[sid] = w_[s2] + dists[sid];
        }
        const double min_val = *std::min_element(vals.begin(), vals.end());
        const double tol = 1e-12 * std::max(1.0, std::abs(min_val));
        int best_server = -1;
        for (int sid = 0; sid < k_; ++sid) {
            if (vals[sid] > min_val + tol) continue;
            if (best_server < 0 || dists[sid] < dists[best_server]) best_server = sid;
        }
        const double cost = dists[best_server];
        cur_[best_server] = q;
        return {best_server, cost};
    }

private:
    double matching_cost(const std::vector<int>& a, const std::vector<int>& b) const {
        const int k = static_cast<int>(a.size());
        std::vector<std::vector<double>> cost(k, std::vector<double>(k));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) cost[i][j] = metric_(a[i], b[j]);
        return min_cost_assignment(cost);
    }

    detail::NetMetric metric_;
    int k_;
    detail::MultisetIndex states_;
    std::vector<int> cur_;
    std::vector<double> w_;
};

// Work function algorithm for k-taxi on the net metric. Serving (a, b) with
// the taxi from x pays d(x, a) and parks the taxi at b, so the update runs
// in two stages through the (k-1)-multisets E:
//   u(E)   = min_x [ w_{t-1}(E + x) + d(x, a) ]
//   w_t(C) = min_{y in C} [ u(C - y) + d(b, y) ]
class WfaKTaxi : public FiniteOnlineAlgorithm {
public:
    WfaKTaxi(const Net& net, std::vector<int> initial_ids, size_t state_guard = 1'000'000)
        : metric_(net),
          k_(static_cast<int>(initial_ids.size())),
          states_(static_cast<int>(net.points.size()), static_cast<int>(initial_ids.size()),
                  state_guard),
          reduced_(static_cast<int>(net.points.size()),
                   static_cast<int>(initial_ids.size()) - 1, state_guard),
          cur_(std::move(initial_ids)) {
        w_.resize(states_.count());
        std::vector<int> init = cur_;
        std::sort(init.begin(), init.end());
        for (size_t s = 0; s < states_.count(); ++s) w_[s] = matching_cost(init, states_.at(s));
    }

    Problem problem() const override { return Problem::KTaxi; }
    const std::vector<int>& config_ids() const override { return cur_; }
    std::string name() const override { return "wfa"; }
    const std::vector<double>& work_function() const { return w_; }

    std::pair<int, double> step(const std::vector<int>& request_ids) override {
        const int a = request_ids.at(0);
        const int b = request_ids.at(1);
        const int n = static_cast<int>(metric_.size());
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw std::invalid_argument("wfa_step: request point not in net");

        std::vector<double> u(reduced_.count());
        std::vector<int> scratch;
        for (size_t e = 0; e < reduced_.count(); ++e) {
            const auto& E = reduced_.at(e);
            double best = std::numeric_limits<double>::infinity();
            for (int x = 0; x < n; ++x) {
                scratch = E;
                scratch.insert(std::lower_bound(scratch.begin(), scratch.end(), x), x);
                best = std::min(best, w_[states_.index_of(scratch)] + metric_(x, a));
            }
            u[e] = best;
        }
        std::vector<double> next(states_.count());
        for (size_t s = 0; s < states_.count(); ++s) {
            const auto& C = states_.at(s);
            double best = std::numeric_limits<double>::infinity();
            for (int pos = 0; pos < k_; ++pos) {
                if (pos > 0 && C[pos] == C[pos - 1]) continue;
                std::vector<int> rem = C;
                rem.erase(rem.begin() + pos);
                best = std::min(best, u[reduced_.index_of(rem)] + metric_(b, C[pos]));
            }
            next[s] = best;
        }
        w_ = std::move(next);

        std::vector<int> sorted = cur_;
        std::sort(sorted.begin(), sorted.end());
        const size_t cur_idx = states_.index_of(sorted);
        std::vector<double> vals(k_), dists(k_);
        for (int tid = 0; tid < k_; ++tid) {
            const int x = cur_[tid];
            const int pos = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), x) -
                                             sorted.begin());
            const size_t s2 = states_.replace(cur_idx, pos, b, scratch);
            dists[tid] = metric_(x, a);
            vals[tid] = w_[s2] + dists[tid];
        }
        const double min_val = *std::min_element(vals.begin(), vals.end());
        const double tol = 1e-12 * std::max(1.0, std::abs(min_val));
        int best_taxi = -1;
        for (int tid = 0; tid < k_; ++tid) {
            if (vals[tid] > min_val + tol) continue;
            if (best_taxi < 0 || dists[tid] < dists[best_taxi]) best_taxi = tid;
        }
        const double cost = dists[best_taxi];
        cur_[best_taxi] = b;
        return {best_taxi, cost};
    }

private:
    double matching_cost(const std::vector<int>& a, const std::vector<int>& b) const {
        const int k = static_cast<int>(a.size());
        std::vector<std::vector<double>> cost(k, std::vector<double>(k));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) cost[i][j] = metric_(a[i], b[j]);
        return min_cost_assignment(cost);
    }

    detail::NetMetric metric_;
    int k_;
    detail::MultisetIndex states_;
    detail::MultisetIndex reduced_;
    std::vector<int> cur_;
    std::vector<double> w_;
};

// Work function algorithm for chasing small sets as a metrical task system
// on the net: task cost 0 on the projected request points, infinite
// elsewhere, so states collapse onto the request set each step.
class WfaChasing : public FiniteOnlineAlgorithm {
public:
    WfaChasing(const Net& net, std::vector<int> initial_ids, size_t state_guard = 1'000'000)
        : metric_(net), cur_(std::move(initial_ids)) {
        if (cur_.size() != 1) throw std::invalid_argument("chasing algorithm tracks one server");
        if (metric_.size() > state_guard)
            throw std::runtime_error("work function table: configuration count exceeds guard");
        w_.assign(metric_.size(), 0.0);
        for (size_t p = 0; p < metric_.size(); ++p) w_[p] = metric_(cur_[0], static_cast<int>(p));
    }

    Problem problem() const override { return Problem::Chasing; }
    const std::vector<int>& config_ids() const override { return cur_; }
    std::string name() const override { return "wfa"; }
    const std::vector<double>& work_function() const { return w_; }

    std::pair<int, double> step(const std::vector<int>& request_ids) override {
        const int n = static_cast<int>(metric_.size());
        if (request_ids.empty()) throw std::invalid_argument("wfa_step: empty request set");
        for (int q : request_ids)
            if (q < 0 || q >= n) throw std::invalid_argument("wfa_step: request point not in net");

        std::vector<double> v(request_ids.size());
        for (size_t j = 0; j < request_ids.size(); ++j) {
            double best = std::numeric_limits<double>::infinity();
            for (int p = 0; p < n; ++p) best = std::min(best, w_[p] + metric_(p, request_ids[j]));
            v[j] = best;
        }
        std::vector<double> next(n);
        for (int p = 0; p < n; ++p) {
            double best = std::numeric_limits<double>::infinity();
            for (size_t j = 0; j < request_ids.size(); ++j)
                best = std::min(best, v[j] + metric_(request_ids[j], p));
            next[p] = best;
        }
        w_ = std::move(next);

        double best_val = std::numeric_limits<double>::infinity();
        int best_j = -1;
        for (size_t j = 0; j < request_ids.size(); ++j) {
            const double val = w_[request_ids[j]] + metric_(cur_[0], request_ids[j]);
            if (val < best_val - 1e-15) {
                best_val = val;
                best_j = static_cast<int>(j);
            }
        }
        const double cost = metric_(cur_[0], request_ids[best_j]);
        cur_[0] = request_ids[best_j];
        return {best_j, cost};
    }

private:
    detail::NetMetric metric_;
    std::vector<int> cur_;
    std::vector<double> w_;
};

// Nearest server / taxi / request point, ties to the lowest id.
class GreedyFinite : public FiniteOnlineAlgorithm {
public:
    GreedyFinite(const Net& net, Problem problem, std::vector<int> initial_ids)
        : metric_(net), problem_(problem), cur_(std::move(initial_ids)) {}

    Problem problem() const override { return problem_; }
    const std::vector<int>& config_ids() const override { return cur_; }
    std::string name() const override { return "greedy"; }

    std::pair<int, double> step(const std::vector<int>& request_ids) override {
        switch (problem_) {
            case Problem::KServer: {
                const int q = request_ids.at(0);
                const int sid = nearest_owner(q);
                const double d = metric_(cur_[sid], q);
                cur_[sid] = q;
                return {sid, d};
            }
            case Problem::KTaxi: {
                const int a = request_ids.at(0);
                const int b = request_ids.at(1);
                const int tid = nearest_owner(a);
                const double d = metric_(cur_[tid], a);
                cur_[tid] = b;
                return {tid, d};
            }
            case Problem::Chasing: {
                int best_j = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (size_t j = 0; j < request_ids.size(); ++j) {
                    const double d = metric_(cur_[0], request_ids[j]);
                    if (d < best_d) {
                        best_d = d;
                        best_j = static_cast<int>(j);
                    }
                }
                cur_[0] = request_ids[best_j];
                return {best_j, best_d};
            }
        }
        throw std::logic_error("greedy_step: bad problem");
    }

private:
    int nearest_owner(int q) const {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t sid = 0; sid < cur_.size(); ++sid) {
            const double d = metric_(cur_[sid], q);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(sid);
            }
        }
        return best;
    }

    detail::NetMetric metric_;
    Problem problem_;
    std::vector<int> cur_;
};

// Randomized marking for k-server on a uniform net metric (paging style):
// hits mark, misses evict a uniformly random unmarked covered point, and a
// miss with everything marked opens a new phase.
class MarkingKServer : public FiniteOnlineAlgorithm {
public:
    MarkingKServer(const Net& net, std::vector<int> initial_ids, uint64_t seed)
        : metric_(net), cur_(std::move(initial_ids)), rng_(seed) {
        const size_t n = metric_.size();
        if (n < 2) throw std::invalid_argument("marking: net too small");
        double d0 = metric_(0, 1);
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = i + 1; j < n; ++j) {
                const double d = metric_(static_cast<int>(i), static_cast<int>(j));
                if (std::abs(d - d0) > 1e-9 * std::max(d0, d))
                    throw std::invalid_argument("marking: metric is not uniform");
            }
        }
        std::vector<char> seen(n, 0);
        for (int id : cur_) {
            if (seen[id]) throw std::invalid_argument("marking: initial positions must be distinct");
            seen[id] = 1;
        }
        marked_.assign(n, 0);
    }

    Problem problem() const override { return Problem::KServer; }
    const std::vector<int>& config_ids() const override { return cur_; }
    std::string name() const override { return "marking"; }

    std::pair<int, double> step(const std::vector<int>& request_ids) override {
        const int q = request_ids.at(0);
        for (size_t sid = 0; sid < cur_.size(); ++sid) {
            if (cur_[sid] == q) {
                marked_[q] = 1;
                return {static_cast<int>(sid), 0.0};
            }
        }
        std::vector<int> unmarked;
        for (size_t sid = 0; sid < cur_.size(); ++sid)
            if (!marked_[cur_[sid]]) unmarked.push_back(static_cast<int>(sid));
        if (unmarked.empty()) {
            std::fill(marked_.begin(), marked_.end(), 0);
            for (size_t sid = 0; sid < cur_.size(); ++sid) unmarked.push_back(static_cast<int>(sid));
        }
        const int sid = unmarked[rng_.uniform_index(unmarked.size())];
        const double d = metric_(cur_[sid], q);
        cur_[sid] = q;
        marked_[q] = 1;
        return {sid, d};
    }

private:
    detail::NetMetric metric_;
    std::vector<int> cur_;
    Rng rng_;
    std::vector<char> marked_;
};

inline std::unique_ptr<FiniteOnlineAlgorithm> make_finite_algorithm(const std::string& name,
                                                                    const Net& net, Problem problem,
                                                                    std::vector<int> initial_ids,
                                                                    uint64_t seed,
                                                                    size_t state_guard = 1'000'000) {
    if (name == "greedy") return std::make_unique<GreedyFinite>(net, problem, std::move(initial_ids));
    if (name == "wfa") {
        switch (problem) {
            case Problem::KServer:
                return std::make_unique<WfaKServer>(net, std::move(initial_ids), state_guard);
            case Problem::KTaxi:
                return std::make_unique<WfaKTaxi>(net, std::move(initial_ids), state_guard);
            case Problem::Chasing:
                return std::make_unique<WfaChasing>(net, std::move(initial_ids), state_guard);
        }
    }
    if (name == "marking") {
        if (problem != Problem::KServer)
            throw std::invalid_argument("marking is a k-server algorithm");
        return std::make_unique<MarkingKServer>(net, std::move(initial_ids), seed);
    }
    throw std::invalid_argument("unknown finite algorithm: " + name);
}

// Greedy directly on the ball, no net involved: nearest server/taxi to the
// request (ties to the lowest id), nearest request point for chasing.
class ContinuousGreedy {
public:
    ContinuousGreedy(Problem problem, NormedSpace space, Configuration initial)
        : problem_(problem), space_(space), config_(std::move(initial)) {}

    Problem problem() const { return problem_; }
    const Configuration& config() const { return config_; }

    std::pair<int, double> step(const Request& req) {
        switch (problem_) {
            case Problem::KServer: {
                const int sid = nearest_owner(req.points[0]);
                return {sid, serve_kserver(space_, config_, sid, req.points[0])};
            }
            case Problem::KTaxi: {
                const int tid = nearest_owner(req.points[0]);
                return {tid, serve_ktaxi(space_, config_, tid, req.points[0], req.points[1])};
            }
            case Problem::Chasing: {
                int best_j = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (size_t j = 0; j < req.points.size(); ++j) {
                    const double d = distance(space_, config_[0], req.points[j]);
                    if (d < best_d) {
                        best_d = d;
                        best_j = static_cast<int>(j);
                    }
                }
                return {best_j, serve_chase(space_, config_, best_j, req)};
            }
        }
        throw std::logic_error("greedy_step: bad problem");
    }

private:
    int nearest_owner(const Point& target) const {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t sid = 0; sid < config_.size(); ++sid) {
            const double d = distance(space_, config_[sid], target);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(sid);
            }
        }
        return best;
    }

    Problem problem_;
    NormedSpace space_;
    Configuration config_;
};

struct WrapStepResult {
    int decision = -1;
    double step_cost = 0.0;   // inner cost + detour
    double detour = 0.0;
    double inner_cost = 0.0;
};

// Lifts a finite algorithm on the net back to the ball: requests are
// projected, the inner algorithm serves the projection, and the wrapper adds
// the detour to the true request point and back. Between requests the
// wrapper sits exactly on the inner configuration, so
//   cost(A_M) = cost(A_N) + sum of detours + initial projection cost
// holds as an exact ledger identity and every detour is at most 2 eta.
class ProjectionWrapper {
public:
    using InnerFactory = std::function<std::unique_ptr<FiniteOnlineAlgorithm>(
        const Net&, std::vector<int> initial_ids)>;

    ProjectionWrapper(Problem problem, Net net, const Configuration& initial,
                      const InnerFactory& factory)
        : problem_(problem), net_(std::move(net)) {
        std::vector<int> ids;
        ids.reserve(initial.size());
        for (const auto& p : initial) ids.push_back(project(net_, p));
        for (size_t i = 0; i < initial.size(); ++i) {
            ledger_.initial_cost += distance(net_.ball.space, initial[i], net_.points[ids[i]]);
            config_.push_back(net_.points[ids[i]]);
        }
        inner_ = factory(net_, ids);
    }

    Problem problem() const { return problem_; }
    const Net& net() const { return net_; }
    const Configuration& config() const { return config_; }
    const FiniteOnlineAlgorithm& inner() const { return *inner_; }
    const CostLedger& ledger() const { return ledger_; }
    const CostLedger& inner_ledger() const { return inner_ledger_; }
    double initial_projection_cost() const { return ledger_.initial_cost; }

    WrapStepResult step(const Request& raw) {
        WrapStepResult res;
        const auto& space = net_.ball.space;
        std::vector<int> projected;
        projected.reserve(raw.points.size());
        for (const auto& p : raw.points) projected.push_back(project(net_, p));

        const auto [decision, inner_cost] = inner_->step(projected);
        res.decision = decision;
        res.inner_cost = inner_cost;
        switch (problem_) {
            case Problem::KServer: {
                res.detour = 2.0 * distance(space, net_.points[projected[0]], raw.points[0]);
                config_[decision] = net_.points[projected[0]];
                break;
            }
            case Problem::KTaxi: {
                res.detour = distance(space, net_.points[projected[0]], raw.points[0]) +
                             distance(space, raw.points[1], net_.points[projected[1]]);
                config_[decision] = net_.points[projected[1]];
                break;
            }
            case Problem::Chasing: {
                res.detour =
                    2.0 * distance(space, net_.points[projected[decision]], raw.points[decision]);
                config_[0] = net_.points[projected[decision]];
                break;
            }
        }
        res.step_cost = res.inner_cost + res.detour;
        const size_t t = ledger_.records.size();
        ledger_.records.push_back({t, res.step_cost, res.detour, res.decision});
        inner_ledger_.records.push_back({t, res.inner_cost, 0.0, res.decision});
        return res;
    }

    // Wrapper positions must coincide with the inner configuration between
    // requests.
    bool config_matches_inner() const {
        const auto& ids = inner_->config_ids();
        for (size_t i = 0; i < ids.size(); ++i)
            if (config_[i] != net_.points[ids[i]]) return false;
        return true;
    }

private:
    Problem problem_;
    Net net_;
    Configuration config_;
    std::unique_ptr<FiniteOnlineAlgorithm> inner_;
    CostLedger ledger_;
    CostLedger inner_ledger_;
};

// Sigma grid for running multiple wrapped instances when sigma is unknown:
// sigma_i = 2^{-2^i} for i = 1..l-1 with l = ceil(log2 k) + 1. The k-taxi
// grid instead descends until it reaches the supplied floor, since no
// worst-case algorithm exists to anchor the last slot.
struct SigmaGrid {
    std::vector<double> sigmas;    // wrapped experts, in grid order
    bool worst_case_slot = false;  // whether slot l is a worst-case algorithm
};

inline SigmaGrid sigma_ensemble_grid(Problem problem, int k, double sigma_floor = 0.0) {
    SigmaGrid grid;
    if (problem == Problem::KTaxi) {
        if (sigma_floor <= 0.0)
            throw std::invalid_argument("k-taxi ensemble needs a positive sigma lower bound");
        for (int i = 1;; ++i) {
            const double sigma_i = std::pow(2.0, -std::pow(2.0, i));
            grid.sigmas.push_back(sigma_i);
            if (sigma_i <= sigma_floor) break;
        }
        grid.worst_case_slot = false;
        return grid;
    }
    const int ell = static_cast<int>(std::ceil(std::log2(std::max(1, k)))) + 1;
    for (int i = 1; i <= ell - 1; ++i)
        grid.sigmas.push_back(std::pow(2.0, -std::pow(2.0, i)));
    grid.worst_case_slot = true;
    return grid;
}

struct SigmaEnsemble {
    std::vector<std::unique_ptr<ProjectionWrapper>> experts;
    std::vector<double> expert_sigmas;  // 0 marks the worst-case slot
};

// Builds the expert list for unknown sigma (or a single expert when sigma is
// known). `worst_case` supplies slot l for k-server and chasing; it receives
// the finest grid eta as a hint.
inline SigmaEnsemble build_sigma_ensemble(
    Problem problem, int k, const Ball& ball, const Configuration& initial,
    bool sigma_known, double sigma_or_floor, const ProjectionWrapper::InnerFactory& inner_factory,
    const std::function<std::unique_ptr<ProjectionWrapper>(double finest_eta)>& worst_case,
    const NetBuildOptions& net_opts = {}) {
    SigmaEnsemble ens;
    const auto make_expert = [&](double sigma) {
        const double eta = choose_eta(problem, sigma, k, ball.space.dim, ball.radius);
        Net net = build_eta_net(ball, eta, net_opts);
        ens.experts.push_back(
            std::make_unique<ProjectionWrapper>(problem, std::move(net), initial, inner_factory));
        ens.expert_sigmas.push_back(sigma);
    };

    if (sigma_known) {
        if (!(sigma_or_floor > 0.0 && sigma_or_floor <= 1.0))
            throw std::invalid_argument("known sigma must lie in (0, 1]");
        make_expert(sigma_or_floor);
        return ens;
    }

    const SigmaGrid grid = sigma_ensemble_grid(problem, k, sigma_or_floor);
    for (double sigma : grid.sigmas) make_expert(sigma);
    if (grid.worst_case_slot) {
        const double finest =
            grid.sigmas.empty()
                ? choose_eta(problem, 1.0, k, ball.space.dim, ball.radius)
                : choose_eta(problem, grid.sigmas.back(), k, ball.space.dim, ball.radius);
        auto expert = worst_case(finest);
        if (!expert) throw std::invalid_argument("ensemble: missing worst-case expert");
        ens.experts.push_back(std::move(expert));
        ens.expert_sigmas.push_back(0.0);
    }
    return ens;
}

}  // namespace smoothbench
