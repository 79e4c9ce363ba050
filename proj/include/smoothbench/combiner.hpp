#pragma once

// Randomized combination of parallel online algorithms: Hedge weights over
// per-step costs with lazy switching. The tracked expert changes only when
// its posterior share halves from its peak since adoption; resampling draws
// an expert proportionally to the current weights and pays the matching
// distance between configurations (at most the diameter).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "smoothbench/matching.hpp"
#include "smoothbench/metric.hpp"
#include "smoothbench/problems.hpp"
#include "smoothbench/rng.hpp"

namespace smoothbench {

// Matching distance between configurations; a single point distance for
// chasing (k = 1 configurations).
inline double switching_cost(Problem problem, const NormedSpace& space, const Configuration& a,
                             const Configuration& b) {
    (void)problem;
    return config_matching_distance(space, a, b);
}

struct CombinerStepResult {
    int active = 0;
    double incurred = 0.0;     // tracked expert's step cost + switch cost
    bool switched = false;
    double switch_cost = 0.0;
};

class Combiner {
public:
    // diam: diameter of the configuration space the experts move in
    // (k * 2R for k-server and k-taxi, 2R for chasing).
    Combiner(int ell, double epsilon, double diam, uint64_t seed)
        : ell_(ell), eps_(epsilon), diam_(diam), rng_(seed), log_w_(ell, 0.0) {
        if (ell_ < 1) throw std::invalid_argument("combiner: need at least one expert");
        if (eps_ <= 0.0) throw std::invalid_argument("combiner: epsilon must be > 0");
        if (diam_ <= 0.0) throw std::invalid_argument("combiner: diameter must be > 0");
        lambda_ = eps_ / 2.0;  // per diam-scaled unit of loss
        active_ = (ell_ == 1) ? 0 : static_cast<int>(rng_.uniform_index(ell_));
        peak_share_ = 1.0 / ell_;
    }

    int active() const { return active_; }
    int expert_count() const { return ell_; }

    std::vector<double> shares() const {
        double mx = log_w_[0];
        for (double lw : log_w_) mx = std::max(mx, lw);
        std::vector<double> p(ell_);
        double sum = 0.0;
        for (int i = 0; i < ell_; ++i) {
            p[i] = std::exp(log_w_[i] - mx);
            sum += p[i];
        }
        for (double& v : p) v /= sum;
        return p;
    }

    // One synchronized step: every expert has been stepped on the same
    // request; `step_costs[i]` is expert i's cost and `configs[i]` its
    // configuration after the step.
    CombinerStepResult step(const NormedSpace& space, Problem problem,
                            const std::vector<double>& step_costs,
                            const std::vector<Configuration>& configs) {
        if (static_cast<int>(step_costs.size()) != ell_)
            throw std::invalid_argument("combiner_step: cost vector length mismatch");
        if (static_cast<int>(configs.size()) != ell_)
            throw std::invalid_argument("combiner_step: config vector length mismatch");

        CombinerStepResult res;
        res.incurred = step_costs[active_];

        if (ell_ == 1) {
            res.active = active_;
            return res;
        }

        for (int i = 0; i < ell_; ++i)
            log_w_[i] -= lambda_ * std::min(step_costs[i], diam_) / diam_;

        const std::vector<double> p = shares();
        peak_share_ = std::max(peak_share_, p[active_]);
        if (p[active_] < 0.5 * peak_share_) {
            // Resample proportionally to the weights.
            const double u = rng_.uniform01();
            double acc = 0.0;
            int next = ell_ - 1;
            for (int i = 0; i < ell_; ++i) {
                acc += p[i];
                if (u < acc) {
                    next = i;
                    break;
                }
            }
            if (next != active_) {
                res.switched = true;
                res.switch_cost = switching_cost(problem, space, configs[active_], configs[next]);
                res.incurred += res.switch_cost;
                active_ = next;
            }
            peak_share_ = p[active_];
        }
        res.active = active_;
        return res;
    }

private:
    int ell_;
    double eps_;
    double diam_;
    double lambda_;
    Rng rng_;
    std::vector<double> log_w_;
    int active_ = 0;
    double peak_share_ = 1.0;
};

}  // namespace smoothbench
