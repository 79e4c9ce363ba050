#pragma once

// Experiment harness: scenario configs (flat key-value text), seeded trial
// execution, ratio computation, CSV emission, and axis sweeps. Rows are
// byte-reproducible from (scenario, seed); wall-clock timing is only filled
// in when explicitly requested so reruns stay identical.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "smoothbench/combiner.hpp"
#include "smoothbench/lowerbound.hpp"
#include "smoothbench/metric.hpp"
#include "smoothbench/net.hpp"
#include "smoothbench/offline.hpp"
#include "smoothbench/online.hpp"
#include "smoothbench/problems.hpp"
#include "smoothbench/rng.hpp"
#include "smoothbench/smoothing.hpp"

namespace smoothbench {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Scenario {
    Problem problem = Problem::KServer;
    int k = 1;
    int m = 1;
    Norm norm = Norm::Linf;
    double radius = 1.0;
    Point center;  // empty = origin

    GeneratorKind generator = GeneratorKind::UniformBall;
    double rho = 0.0;                     // perturbed
    double sigma_request = 0.0;           // perturbed: sets rho via sigma^(1/m) * R
    std::string base_schedule = "fixed";  // perturbed
    std::vector<Point> base_points;       // perturbed
    std::string script_path;              // scripted
    int chase_set_size = 0;

    std::string algorithm = "greedy";
    size_t T = 100;
    std::vector<uint64_t> seeds{1};
    bool sigma_known = true;
    double sigma_floor = 0.0;
    size_t burn_in = 0;
    double eta_override = 0.0;
    std::string opt_mode = "auto";  // auto | exact | ffd
    Configuration initial;          // empty = k copies of the center

    size_t net_size_guard = 400000;
    size_t state_guard = 1'000'000;
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<Point> parse_point_list(std::istringstream& ss) {
    // Points separated by ';', coordinates by spaces: "0 0.5; 1 0.25".
    std::string rest;
    std::getline(ss, rest);
    std::vector<Point> pts;
    std::istringstream groups(rest);
    std::string group;
    while (std::getline(groups, group, ';')) {
        std::istringstream gs(group);
        Point p;
        double v;
        while (gs >> v) p.push_back(v);
        if (!p.empty()) pts.push_back(std::move(p));
    }
    return pts;
}

}  // namespace detail

inline Scenario parse_scenario_text(const std::string& text) {
    Scenario sc;
    sc.seeds.clear();
    std::istringstream in(text);
    std::string line;
    bool saw_center = false, saw_init = false;
    while (std::getline(in, line)) {
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        if (key == "problem") {
            std::string v;
            ss >> v;
            sc.problem = problem_from_name(v);
        } else if (key == "k") ss >> sc.k;
        else if (key == "m") ss >> sc.m;
        else if (key == "norm") {
            std::string v;
            ss >> v;
            sc.norm = norm_from_name(v);
        } else if (key == "radius") ss >> sc.radius;
        else if (key == "center") {
            sc.center.clear();
            double v;
            while (ss >> v) sc.center.push_back(v);
            saw_center = true;
        } else if (key == "generator") {
            std::string v;
            ss >> v;
            if (v == "uniform") sc.generator = GeneratorKind::UniformBall;
            else if (v == "perturbed") sc.generator = GeneratorKind::PerturbedBase;
            else if (v == "hypercube") sc.generator = GeneratorKind::LowerBoundHypercube;
            else if (v == "scripted") sc.generator = GeneratorKind::Scripted;
            else throw ScenarioError("unknown generator: " + v);
        } else if (key == "rho") ss >> sc.rho;
        else if (key == "sigma") ss >> sc.sigma_request;
        else if (key == "base_schedule") ss >> sc.base_schedule;
        else if (key == "base_points") sc.base_points = detail::parse_point_list(ss);
        else if (key == "script") ss >> sc.script_path;
        else if (key == "chase_set_size") ss >> sc.chase_set_size;
        else if (key == "algorithm") ss >> sc.algorithm;
        else if (key == "T") ss >> sc.T;
        else if (key == "seeds") {
            uint64_t v;
            while (ss >> v) sc.seeds.push_back(v);
        } else if (key == "sigma_mode") {
            std::string v;
            ss >> v;
            if (v == "known") sc.sigma_known = true;
            else if (v == "unknown") sc.sigma_known = false;
            else throw ScenarioError("sigma_mode must be known or unknown");
        } else if (key == "sigma_floor") ss >> sc.sigma_floor;
        else if (key == "burn_in") ss >> sc.burn_in;
        else if (key == "eta_override") ss >> sc.eta_override;
        else if (key == "opt_mode") ss >> sc.opt_mode;
        else if (key == "init") {
            sc.initial = detail::parse_point_list(ss);
            saw_init = true;
        } else if (key == "net_size_guard") ss >> sc.net_size_guard;
        else if (key == "state_guard") ss >> sc.state_guard;
        else throw ScenarioError("unknown scenario key: " + key);
    }
    (void)saw_center;
    (void)saw_init;
    if (sc.seeds.empty()) sc.seeds.push_back(1);
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

// Fills derived geometry (hypercube instances pin the ball), applies sigma ->
// rho conversion, default center/initial, and checks basic invariants.
inline void normalize_scenario(Scenario& sc) {
    if (sc.k < 1) throw ScenarioError("k must be >= 1");
    if (sc.T < 1 && sc.generator != GeneratorKind::Scripted) throw ScenarioError("T must be >= 1");
    {
        std::vector<uint64_t> sorted = sc.seeds;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ScenarioError("seeds must be distinct");
    }
    if (sc.generator == GeneratorKind::LowerBoundHypercube) {
        const auto inst = HypercubeInstance::make(sc.k);
        sc.m = inst.m;
        sc.norm = Norm::Linf;
        sc.radius = 0.5;
        sc.center.assign(sc.m, 0.5);
        if (sc.initial.empty()) {
            const int servers = (sc.problem == Problem::Chasing) ? 1 : sc.k;
            for (int i = 0; i < servers; ++i) sc.initial.push_back(inst.vertices[i]);
        }
    }
    if (sc.center.empty()) sc.center.assign(sc.m, 0.0);
    if (static_cast<int>(sc.center.size()) != sc.m) throw ScenarioError("center dimension mismatch");
    if (sc.generator == GeneratorKind::PerturbedBase) {
        if (sc.sigma_request > 0.0) {
            if (sc.sigma_request > 1.0) throw ScenarioError("sigma must lie in (0, 1]");
            const double derived = sc.radius * std::pow(sc.sigma_request, 1.0 / sc.m);
            if (sc.rho > 0.0 && std::abs(sc.rho - derived) > 1e-12 * sc.radius)
                throw ScenarioError("give either sigma or rho for the perturbed generator");
            sc.rho = derived;
        }
        if (sc.rho <= 0.0) throw ScenarioError("perturbed generator needs rho or sigma");
        if (sc.base_points.empty() && sc.base_schedule != "farthest")
            throw ScenarioError("perturbed generator needs base_points (or the farthest schedule)");
    }
    if (sc.initial.empty()) {
        const int servers = (sc.problem == Problem::Chasing) ? 1 : sc.k;
        sc.initial.assign(servers, sc.center);
    }
    const int expect = (sc.problem == Problem::Chasing) ? 1 : sc.k;
    if (static_cast<int>(sc.initial.size()) != expect)
        throw ScenarioError("initial configuration must hold " + std::to_string(expect) + " points");
    for (const auto& p : sc.initial)
        if (static_cast<int>(p.size()) != sc.m) throw ScenarioError("initial point dimension mismatch");
}

inline std::string canonical_scenario(const Scenario& sc) {
    std::ostringstream out;
    out << "problem=" << problem_name(sc.problem) << ";k=" << sc.k << ";m=" << sc.m
        << ";norm=" << norm_name(sc.norm) << ";radius=" << detail::fmt_double(sc.radius) << ";center=";
    for (double c : sc.center) out << detail::fmt_double(c) << ",";
    out << ";generator=" << generator_name(sc.generator) << ";rho=" << detail::fmt_double(sc.rho)
        << ";base_schedule=" << sc.base_schedule << ";base_points=";
    for (const auto& p : sc.base_points) {
        for (double c : p) out << detail::fmt_double(c) << ",";
        out << "|";
    }
    out << ";script=" << sc.script_path << ";chase_set_size=" << sc.chase_set_size
        << ";algorithm=" << sc.algorithm << ";T=" << sc.T
        << ";sigma_known=" << (sc.sigma_known ? 1 : 0)
        << ";sigma_floor=" << detail::fmt_double(sc.sigma_floor) << ";burn_in=" << sc.burn_in
        << ";eta_override=" << detail::fmt_double(sc.eta_override) << ";opt_mode=" << sc.opt_mode
        << ";init=";
    for (const auto& p : sc.initial) {
        for (double c : p) out << detail::fmt_double(c) << ",";
        out << "|";
    }
    return out.str();
}

inline std::string scenario_hash_hex(const Scenario& sc) {
    const std::string canon = canonical_scenario(sc);
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct ResultRow {
    std::string scenario;
    uint64_t seed = 0;
    Problem problem = Problem::KServer;
    std::string algorithm;
    int k = 0;
    int m = 0;
    Norm norm = Norm::Linf;
    double sigma = 0.0;
    double eta = 0.0;
    size_t net_size = 0;
    size_t T = 0;
    size_t burn_in = 0;
    double online_cost = 0.0;
    double opt_cost = 0.0;
    std::string opt_kind;
    double ratio = 0.0;
    double opt_per_request = 0.0;
    double log2_k_over_sigma = 0.0;
    double runtime_ms = 0.0;

    bool has_lb_columns = false;
    double epsilon = 0.0;
    int vertex_count = 0;
    double ffd_cost = 0.0;
};

inline std::string csv_header(bool lb_columns = false) {
    std::string h =
        "scenario,seed,problem,algorithm,k,m,norm,sigma,eta,net_size,T,burn_in,online_cost,"
        "opt_cost,opt_kind,ratio,opt_per_request,log2_k_over_sigma,runtime_ms";
    if (lb_columns) h += ",epsilon,vertex_count,ffd_cost";
    return h;
}

inline std::string render_row(const ResultRow& r) {
    std::ostringstream out;
    out << r.scenario << "," << r.seed << "," << problem_name(r.problem) << "," << r.algorithm << ","
        << r.k << "," << r.m << "," << norm_name(r.norm) << "," << detail::fmt_double(r.sigma) << ","
        << detail::fmt_double(r.eta) << "," << r.net_size << "," << r.T << "," << r.burn_in << ","
        << detail::fmt_double(r.online_cost) << "," << detail::fmt_double(r.opt_cost) << ","
        << r.opt_kind << "," << detail::fmt_double(r.ratio) << ","
        << detail::fmt_double(r.opt_per_request) << "," << detail::fmt_double(r.log2_k_over_sigma)
        << "," << detail::fmt_double(r.runtime_ms);
    if (r.has_lb_columns)
        out << "," << detail::fmt_double(r.epsilon) << "," << r.vertex_count << ","
            << detail::fmt_double(r.ffd_cost);
    return out.str();
}

namespace detail {

struct OnlineRun {
    CostLedger ledger;
    std::vector<int> decisions;
    double eta = 0.0;
    size_t net_size = 0;
};

inline std::unique_ptr<ProjectionWrapper> make_wrapped(Problem problem, const Ball& ball,
                                                       const Configuration& initial,
                                                       const std::string& inner, double eta,
                                                       uint64_t alg_seed, size_t net_guard,
                                                       size_t state_guard) {
    const double bound = std::pow(3.0 * ball.radius / eta, ball.space.dim);
    if (bound > static_cast<double>(net_guard))
        throw ScenarioError("net size bound " + std::to_string(bound) +
                            " exceeds the guard; raise net_size_guard or use a coarser eta");
    Net net = build_eta_net(ball, eta);
    ProjectionWrapper::InnerFactory factory = [&inner, alg_seed, state_guard, problem](
                                                  const Net& n, std::vector<int> ids) {
        return make_finite_algorithm(inner, n, problem, std::move(ids), alg_seed, state_guard);
    };
    return std::make_unique<ProjectionWrapper>(problem, std::move(net), initial, factory);
}

inline std::unique_ptr<ProjectionWrapper> make_worst_case_expert(Problem problem, const Ball& ball,
                                                                 const Configuration& initial,
                                                                 double finest_eta, uint64_t alg_seed,
                                                                 size_t net_guard, size_t state_guard) {
    const double candidates[2] = {finest_eta / 2.0, finest_eta};
    for (double eta : candidates) {
        for (const char* inner : {"wfa", "greedy"}) {
            try {
                return make_wrapped(problem, ball, initial, inner, eta, alg_seed, net_guard,
                                    state_guard);
            } catch (const std::exception&) {
                continue;
            }
        }
    }
    throw ScenarioError("ensemble: could not build a worst-case expert within the guards");
}

}  // namespace detail

// One seeded trial: generate the request stream, run the configured
// algorithm, solve the offline optimum, emit a row.
inline ResultRow run_trial(const Scenario& sc_in, uint64_t seed, bool with_timing = false) {
    Scenario sc = sc_in;
    normalize_scenario(sc);
    const auto t_start = std::chrono::steady_clock::now();

    const NormedSpace space(sc.m, sc.norm);
    const Ball ball(space, sc.center, sc.radius);
    const std::string hash = scenario_hash_hex(sc);
    const uint64_t hash_num = std::stoull(hash, nullptr, 16);

    GeneratorDescriptor desc;
    desc.kind = sc.generator;
    desc.problem = sc.problem;
    desc.k = sc.k;
    desc.chase_set_size = sc.chase_set_size;
    desc.rho = sc.rho;
    desc.base_schedule = sc.base_schedule;
    desc.base_points = sc.base_points;

    size_t T = sc.T;
    if (sc.generator == GeneratorKind::Scripted) {
        std::ifstream in(sc.script_path);
        if (!in) throw ScenarioError("cannot open script trace: " + sc.script_path);
        Trace trace = load_trace(in);
        if (trace.problem != sc.problem) throw ScenarioError("script trace problem mismatch");
        desc.script = trace.requests;
        if (T == 0 || T > desc.script.size()) T = desc.script.size();
        if (sc_in.initial.empty() && !trace.initial_config.empty()) sc.initial = trace.initial_config;
    }

    double sigma_cert = 0.0;
    if (sc.generator != GeneratorKind::Scripted) sigma_cert = sigma_of_generator(desc, ball);

    Rng rng_adversary(mix_seed(mix_seed(hash_num, seed), 0xadULL));
    const uint64_t alg_seed = mix_seed(mix_seed(hash_num, seed), 0xa1ULL);
    const uint64_t comb_seed = mix_seed(mix_seed(hash_num, seed), 0xc0ULL);

    std::vector<Request> requests;
    requests.reserve(T);
    for (size_t t = 0; t < T; ++t)
        requests.push_back(sample_request(desc, ball, requests, rng_adversary));

    // --- online algorithm ---
    detail::OnlineRun run;
    std::string algorithm = sc.algorithm;
    if (algorithm == "wfa" || algorithm == "marking") algorithm = "wrapped:" + algorithm;

    if (algorithm == "greedy") {
        ContinuousGreedy alg(sc.problem, space, sc.initial);
        for (size_t t = 0; t < T; ++t) {
            const auto [dec, cost] = alg.step(requests[t]);
            run.ledger.records.push_back({t, cost, 0.0, dec});
            run.decisions.push_back(dec);
        }
        if (sigma_cert > 0.0)
            run.eta = choose_eta(sc.problem, sigma_cert, sc.k, sc.m, sc.radius);
        else if (sc.eta_override > 0.0)
            run.eta = sc.eta_override;
    } else if (algorithm.starts_with("wrapped:")) {
        const std::string inner = algorithm.substr(8);
        double eta = sc.eta_override;
        if (eta <= 0.0) {
            if (sigma_cert <= 0.0)
                throw ScenarioError("wrapped algorithms need a sigma certificate or eta_override");
            eta = choose_eta(sc.problem, sigma_cert, sc.k, sc.m, sc.radius);
        }
        auto wrapper = detail::make_wrapped(sc.problem, ball, sc.initial, inner, eta, alg_seed,
                                            sc.net_size_guard, sc.state_guard);
        for (size_t t = 0; t < T; ++t) {
            const auto res = wrapper->step(requests[t]);
            run.decisions.push_back(res.decision);
        }
        run.ledger = wrapper->ledger();
        run.eta = eta;
        run.net_size = wrapper->net().points.size();
    } else if (algorithm.starts_with("ensemble:")) {
        const std::string inner = algorithm.substr(9);
        ProjectionWrapper::InnerFactory factory = [&inner, alg_seed, &sc](const Net& n,
                                                                          std::vector<int> ids) {
            return make_finite_algorithm(inner, n, sc.problem, std::move(ids), alg_seed,
                                         sc.state_guard);
        };
        auto worst = [&](double finest_eta) {
            return detail::make_worst_case_expert(sc.problem, ball, sc.initial, finest_eta, alg_seed,
                                                  sc.net_size_guard, sc.state_guard);
        };
        NetBuildOptions net_opts;
        SigmaEnsemble ens =
            build_sigma_ensemble(sc.problem, sc.k, ball, sc.initial, sc.sigma_known,
                                 sc.sigma_known ? sigma_cert : sc.sigma_floor, factory, worst, net_opts);
        const int ell = static_cast<int>(ens.experts.size());
        const double diam =
            (sc.problem == Problem::Chasing) ? 2.0 * sc.radius : 2.0 * sc.radius * sc.k;
        Combiner combiner(ell, 1.0, diam, comb_seed);
        run.ledger.initial_cost = ens.experts[combiner.active()]->initial_projection_cost();
        std::vector<double> costs(ell);
        std::vector<Configuration> configs(ell);
        for (size_t t = 0; t < T; ++t) {
            for (int i = 0; i < ell; ++i) {
                const auto res = ens.experts[i]->step(requests[t]);
                costs[i] = res.step_cost;
                configs[i] = ens.experts[i]->config();
            }
            const auto cres = combiner.step(space, sc.problem, costs, configs);
            run.ledger.records.push_back({t, cres.incurred, 0.0, cres.active});
            run.decisions.push_back(cres.active);
        }
        double finest = std::numeric_limits<double>::infinity();
        for (const auto& ex : ens.experts) {
            if (ex->net().eta < finest) {
                finest = ex->net().eta;
                run.net_size = ex->net().points.size();
            }
        }
        run.eta = finest;
    } else {
        throw ScenarioError("unknown algorithm: " + sc.algorithm);
    }

    // --- offline optimum ---
    OfflineSolution opt;
    std::string opt_kind = "exact";
    const bool is_chasing = sc.problem == Problem::Chasing;
    const double arcs_estimate =
        0.5 * static_cast<double>(T) * static_cast<double>(T) + 4.0 * static_cast<double>(T);
    const bool flow_ok = T <= 100000 && arcs_estimate <= 4e7;
    if (is_chasing) {
        opt = opt_chasing(space, sc.initial[0], requests);
    } else if (sc.opt_mode == "exact" || (sc.opt_mode == "auto" && flow_ok)) {
        if (!flow_ok && sc.opt_mode == "exact")
            throw ScenarioError("exact OPT requested but the flow graph exceeds the memory guard");
        if (sc.problem == Problem::KServer) {
            std::vector<Point> pts;
            pts.reserve(T);
            for (const auto& r : requests) pts.push_back(r.points[0]);
            opt = opt_kserver(space, sc.initial, pts);
        } else {
            opt = opt_ktaxi(space, sc.initial, requests);
        }
    } else if (sc.generator == GeneratorKind::LowerBoundHypercube || sc.opt_mode == "ffd") {
        if (sc.generator != GeneratorKind::LowerBoundHypercube)
            throw ScenarioError("ffd offline bound only applies to hypercube instances");
        const auto inst = HypercubeInstance::make(sc.k);
        const auto ffd = offline_ffd_strategy(inst, sc.problem, sc.initial, requests);
        opt.cost = ffd.cost;
        opt.decisions = ffd.decisions;
        opt_kind = "upper_bound";
    } else {
        throw ScenarioError("exact OPT infeasible at this T and no FFD fallback for this generator");
    }

    // Per-step OPT costs for burn-in accounting.
    CostLedger opt_ledger;
    {
        Configuration config = sc.initial;
        for (size_t t = 0; t < T; ++t) {
            double c = 0.0;
            switch (sc.problem) {
                case Problem::KServer:
                    c = serve_kserver(space, config, opt.decisions[t], requests[t].points[0]);
                    break;
                case Problem::KTaxi:
                    c = serve_ktaxi(space, config, opt.decisions[t], requests[t].points[0],
                                    requests[t].points[1]);
                    break;
                case Problem::Chasing:
                    c = serve_chase(space, config, opt.decisions[t], requests[t]);
                    break;
            }
            opt_ledger.records.push_back({t, c, 0.0, opt.decisions[t]});
        }
    }

    ResultRow row;
    row.scenario = hash;
    row.seed = seed;
    row.problem = sc.problem;
    row.algorithm = sc.algorithm;
    row.k = sc.k;
    row.m = sc.m;
    row.norm = sc.norm;
    row.sigma = sigma_cert;
    row.eta = run.eta;
    row.net_size = run.net_size;
    row.T = T;
    row.burn_in = sc.burn_in;
    row.online_cost = run.ledger.total();
    row.opt_cost = opt.cost;
    row.opt_kind = opt_kind;
    const double online_after = run.ledger.total_after(sc.burn_in);
    const double opt_after = opt_ledger.total_after(sc.burn_in);
    row.ratio = online_after / opt_after;
    row.opt_per_request = opt.cost / static_cast<double>(T);
    row.log2_k_over_sigma =
        (sigma_cert > 0.0) ? std::log2(static_cast<double>(sc.k) / sigma_cert)
                           : std::numeric_limits<double>::infinity();
    if (sc.generator == GeneratorKind::LowerBoundHypercube) {
        const auto inst = HypercubeInstance::make(sc.k);
        row.has_lb_columns = true;
        row.epsilon = inst.eps;
        row.vertex_count = inst.k + 1;
        if (opt_kind == "upper_bound") {
            row.ffd_cost = opt.cost;
        } else {
            row.ffd_cost = offline_ffd_strategy(inst, sc.problem, sc.initial, requests).cost;
        }
    }
    if (with_timing) {
        const auto t_end = std::chrono::steady_clock::now();
        row.runtime_ms = std::chrono::duration<double, std::milli>(t_end - t_start).count();
    }
    return row;
}

// Regenerates the request stream of (scenario, seed) and returns it as a
// trace served by the offline optimum, with the OPT section filled in.
// Scripted replays of this file reproduce the instance bit-exactly.
inline Trace build_trial_trace(const Scenario& sc_in, uint64_t seed) {
    Scenario sc = sc_in;
    normalize_scenario(sc);
    const NormedSpace space(sc.m, sc.norm);
    const Ball ball(space, sc.center, sc.radius);
    const std::string hash = scenario_hash_hex(sc);
    const uint64_t hash_num = std::stoull(hash, nullptr, 16);

    GeneratorDescriptor desc;
    desc.kind = sc.generator;
    desc.problem = sc.problem;
    desc.k = sc.k;
    desc.chase_set_size = sc.chase_set_size;
    desc.rho = sc.rho;
    desc.base_schedule = sc.base_schedule;
    desc.base_points = sc.base_points;
    if (sc.generator == GeneratorKind::Scripted) {
        std::ifstream in(sc.script_path);
        if (!in) throw ScenarioError("cannot open script trace: " + sc.script_path);
        desc.script = load_trace(in).requests;
        if (sc.T == 0 || sc.T > desc.script.size()) sc.T = desc.script.size();
    }

    Rng rng_adversary(mix_seed(mix_seed(hash_num, seed), 0xadULL));
    Trace trace;
    trace.problem = sc.problem;
    trace.space = space;
    trace.ball = ball;
    trace.seed = seed;
    trace.initial_config = sc.initial;
    for (size_t t = 0; t < sc.T; ++t)
        trace.requests.push_back(sample_request(desc, ball, trace.requests, rng_adversary));

    OfflineSolution opt;
    switch (sc.problem) {
        case Problem::KServer: {
            std::vector<Point> pts;
            for (const auto& r : trace.requests) pts.push_back(r.points[0]);
            opt = opt_kserver(space, sc.initial, pts);
            break;
        }
        case Problem::KTaxi:
            opt = opt_ktaxi(space, sc.initial, trace.requests);
            break;
        case Problem::Chasing:
            opt = opt_chasing(space, sc.initial[0], trace.requests);
            break;
    }
    Configuration config = sc.initial;
    for (size_t t = 0; t < sc.T; ++t) {
        trace.decisions.push_back(opt.decisions[t]);
        double c = 0.0;
        switch (sc.problem) {
            case Problem::KServer:
                c = serve_kserver(space, config, opt.decisions[t], trace.requests[t].points[0]);
                break;
            case Problem::KTaxi:
                c = serve_ktaxi(space, config, opt.decisions[t], trace.requests[t].points[0],
                                trace.requests[t].points[1]);
                break;
            case Problem::Chasing:
                c = serve_chase(space, config, opt.decisions[t], trace.requests[t]);
                break;
        }
        trace.step_costs.push_back(c);
    }
    trace.has_opt = true;
    trace.opt_cost = opt.cost;
    trace.opt_decisions = opt.decisions;
    return trace;
}

inline int worker_count() {
    if (const char* s = std::getenv("SMOOTHBENCH_WORKERS")) {
        const int v = std::atoi(s);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(std::min(4u, hw)) : 1;
}

// All seeds of one scenario; trials run in parallel, rows come back in seed
// order regardless of the worker count.
inline std::vector<ResultRow> run_scenario(const Scenario& sc, bool with_timing = false) {
    Scenario norm_sc = sc;
    normalize_scenario(norm_sc);
    std::vector<ResultRow> rows(norm_sc.seeds.size());
    const int workers = std::min<int>(worker_count(), static_cast<int>(norm_sc.seeds.size()));
    if (workers <= 1) {
        for (size_t i = 0; i < norm_sc.seeds.size(); ++i)
            rows[i] = run_trial(norm_sc, norm_sc.seeds[i], with_timing);
        return rows;
    }
    std::vector<std::thread> pool;
    std::mutex error_mutex;
    std::string first_error;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (size_t i = w; i < norm_sc.seeds.size(); i += workers) {
                try {
                    rows[i] = run_trial(norm_sc, norm_sc.seeds[i], with_timing);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (first_error.empty()) first_error = e.what();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (!first_error.empty()) throw ScenarioError(first_error);
    return rows;
}

// Cartesian sweep over one axis; rows ordered by (axis value, seed).
inline std::vector<ResultRow> sweep(const Scenario& base, const std::string& axis,
                                    const std::vector<double>& values, bool with_timing = false) {
    std::vector<ResultRow> rows;
    for (double value : values) {
        Scenario sc = base;
        if (axis == "sigma") {
            if (sc.generator == GeneratorKind::UniformBall && value == 1.0) {
                // uniform is exactly sigma = 1
            } else if (sc.generator == GeneratorKind::PerturbedBase) {
                sc.rho = 0.0;
                sc.sigma_request = value;
            } else {
                throw ScenarioError("sigma axis needs the perturbed generator (or uniform at 1.0)");
            }
        } else if (axis == "k") {
            sc.k = static_cast<int>(value);
            sc.initial.clear();
        } else if (axis == "T") {
            sc.T = static_cast<size_t>(value);
        } else if (axis == "m") {
            sc.m = static_cast<int>(value);
            if (!base.center.empty() && static_cast<int>(base.center.size()) != sc.m)
                throw ScenarioError("m axis sweep needs a default (origin) center");
            sc.center.clear();
            sc.initial.clear();
            for (auto& p : sc.base_points) p.resize(sc.m, 0.0);
        } else {
            throw ScenarioError("unknown sweep axis: " + axis);
        }
        auto batch = run_scenario(sc, with_timing);
        rows.insert(rows.end(), batch.begin(), batch.end());
    }
    return rows;
}

inline void write_csv(const std::vector<ResultRow>& rows, std::ostream& out, bool lb_columns = false) {
    out << csv_header(lb_columns) << "\n";
    for (const auto& r : rows) out << render_row(r) << "\n";
}

// The hypercube ratio experiment: every algorithm in `algorithms` runs on
// the same instances; rows carry the instance columns and the FFD bound.
inline std::vector<ResultRow> ratio_experiment(Problem problem, const std::vector<int>& ks, size_t T,
                                               int seed_count,
                                               const std::vector<std::string>& algorithms) {
    std::vector<ResultRow> rows;
    for (int k : ks) {
        if (k < 2) throw ScenarioError("lb-experiment needs k >= 2");
        for (const std::string& alg : algorithms) {
            Scenario sc;
            sc.problem = problem;
            sc.k = k;
            sc.generator = GeneratorKind::LowerBoundHypercube;
            sc.algorithm = alg;
            sc.T = T;
            sc.seeds.clear();
            for (int s = 1; s <= seed_count; ++s) sc.seeds.push_back(static_cast<uint64_t>(s));
            auto batch = run_scenario(sc);
            rows.insert(rows.end(), batch.begin(), batch.end());
        }
    }
    return rows;
}

}  // namespace smoothbench
