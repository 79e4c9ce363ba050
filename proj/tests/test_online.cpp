#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "smoothbench/offline.hpp"
#include "smoothbench/online.hpp"

using namespace smoothbench;

namespace {

// Hypercube corners under Linf are pairwise at distance exactly 1, which
// makes handy uniform finite metrics.
Net uniform_corner_net(int m, int count, double eta = 0.4) {
    Ball ball(NormedSpace(m, Norm::Linf), Point(m, 0.5), 0.5);
    std::vector<Point> pts;
    for (int v = 0; v < count; ++v) {
        Point p(m, 0.0);
        for (int i = 0; i < m; ++i) p[i] = (v >> i) & 1;
        pts.push_back(p);
    }
    return make_net_from_points(ball, eta, std::move(pts));
}

Net line_net(std::vector<Point> pts, double eta) {
    Ball ball(NormedSpace(1, Norm::L2), {0.5}, 0.5);
    return make_net_from_points(ball, eta, std::move(pts));
}

}  // namespace

TEST_CASE("wfa forced move on the two-point metric") {
    const Net net = uniform_corner_net(1, 2);  // points 0 and 1
    WfaKServer wfa(net, {0});
    const auto [decision, cost] = wfa.step({1});
    CHECK(decision == 0);
    CHECK(cost == 1.0);
    // states: {0} then {1}
    const auto& w = wfa.work_function();
    const auto& idx = wfa.state_index();
    REQUIRE(idx.count() == 2);
    CHECK(w[idx.index_of({1})] == 1.0);
    CHECK(w[idx.index_of({0})] == 2.0);
}

TEST_CASE("wfa covered request costs nothing and keeps the configuration") {
    const Net net = uniform_corner_net(2, 4);
    WfaKServer wfa(net, {0, 1});
    auto [dec, cost] = wfa.step({1});
    CHECK(cost == 0.0);
    CHECK(dec == 1);
    CHECK(wfa.config_ids() == std::vector<int>{0, 1});
    CHECK_THROWS_AS(wfa.step({9}), std::invalid_argument);
}

TEST_CASE("wfa cost between OPT and the classical guarantee") {
    const Net net = uniform_corner_net(2, 4);
    Rng rng(1234);
    for (int trial = 0; trial < 10; ++trial) {
        WfaKServer wfa(net, {0, 1, 2});
        std::vector<Point> requests;
        double wfa_cost = 0.0;
        for (int t = 0; t < 50; ++t) {
            const int q = static_cast<int>(rng.uniform_index(4));
            requests.push_back(net.points[q]);
            wfa_cost += wfa.step({q}).second;
        }
        Configuration initial{net.points[0], net.points[1], net.points[2]};
        const double opt = opt_kserver(net.ball.space, initial, requests).cost;
        const int k = 3;
        CHECK(wfa_cost >= opt - 1e-9);
        CHECK(wfa_cost <= (2 * k - 1) * opt + (2 * k - 1) * (k + 1) * 1.0);
    }
}

TEST_CASE("wfa work function stays monotone and Lipschitz on small instances") {
    const Net net = line_net({{0.0}, {0.3}, {0.55}, {0.8}, {1.0}}, 0.2);
    Rng rng(55);
    WfaKServer wfa(net, {0, 2, 4});
    const auto& idx = wfa.state_index();
    std::vector<double> prev = wfa.work_function();
    const auto matching = [&](const std::vector<int>& a, const std::vector<int>& b) {
        std::vector<std::vector<double>> cost(a.size(), std::vector<double>(a.size()));
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < a.size(); ++j)
                cost[i][j] = distance(net.ball.space, net.points[a[i]], net.points[b[j]]);
        return min_cost_assignment(cost);
    };
    for (int t = 0; t < 25; ++t) {
        wfa.step({static_cast<int>(rng.uniform_index(5))});
        const auto& w = wfa.work_function();
        for (size_t s = 0; s < idx.count(); ++s) CHECK(w[s] >= prev[s] - 1e-12);
        for (size_t s1 = 0; s1 < idx.count(); ++s1)
            for (size_t s2 = s1 + 1; s2 < idx.count(); ++s2)
                CHECK(std::abs(w[s1] - w[s2]) <= matching(idx.at(s1), idx.at(s2)) + 1e-9);
        prev = w;
    }
}

TEST_CASE("wfa produces legal validated traces") {
    const Net net = line_net({{0.0}, {0.25}, {0.5}, {0.75}, {1.0}}, 0.2);
    Rng rng(66);
    WfaKServer wfa(net, {0, 4});
    Trace trace;
    trace.problem = Problem::KServer;
    trace.space = net.ball.space;
    trace.ball = net.ball;
    trace.initial_config = {net.points[0], net.points[4]};
    for (int t = 0; t < 30; ++t) {
        const int q = static_cast<int>(rng.uniform_index(5));
        const auto [dec, cost] = wfa.step({q});
        trace.requests.push_back(Request::server(net.points[q]));
        trace.decisions.push_back(dec);
        trace.step_costs.push_back(cost);
    }
    CHECK(validate_trace(trace));
}

TEST_CASE("taxi wfa beats nothing below OPT and relocates for free") {
    const Net net = line_net({{0.0}, {0.5}, {1.0}}, 0.3);
    Rng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        WfaKTaxi wfa(net, {0, 2});
        std::vector<Request> requests;
        double online = 0.0;
        for (int t = 0; t < 12; ++t) {
            const int a = static_cast<int>(rng.uniform_index(3));
            const int b = static_cast<int>(rng.uniform_index(3));
            requests.push_back(Request::taxi(net.points[a], net.points[b]));
            online += wfa.step({a, b}).second;
        }
        Configuration initial{net.points[0], net.points[2]};
        const double opt = opt_ktaxi(net.ball.space, initial, requests).cost;
        CHECK(online >= opt - 1e-9);
    }
}

TEST_CASE("chasing wfa serves within the request set and dominates OPT") {
    const Net net = line_net({{0.0}, {0.25}, {0.5}, {0.75}, {1.0}}, 0.2);
    Rng rng(88);
    for (int trial = 0; trial < 10; ++trial) {
        WfaChasing wfa(net, {2});
        std::vector<Request> requests;
        double online = 0.0;
        for (int t = 0; t < 15; ++t) {
            const int sz = 1 + static_cast<int>(rng.uniform_index(3));
            std::vector<int> ids;
            std::vector<Point> pts;
            for (int j = 0; j < sz; ++j) {
                ids.push_back(static_cast<int>(rng.uniform_index(5)));
                pts.push_back(net.points[ids.back()]);
            }
            requests.push_back(Request::chase(pts));
            const auto [choice, cost] = wfa.step(ids);
            CHECK(choice >= 0);
            CHECK(choice < sz);
            CHECK(wfa.config_ids()[0] == ids[choice]);
            online += cost;
        }
        const double opt = opt_chasing(net.ball.space, net.points[2], requests).cost;
        CHECK(online >= opt - 1e-9);
    }
}

TEST_CASE("greedy nearest with lowest-id ties") {
    const Net net = line_net({{0.0}, {0.4}, {1.0}}, 0.3);
    GreedyFinite greedy(net, Problem::KServer, {0, 2});
    auto [dec, cost] = greedy.step({1});  // distances 0.4 vs 0.6
    CHECK(dec == 0);
    CHECK_THAT(cost, Catch::Matchers::WithinAbs(0.4, 1e-12));

    // exact tie: servers at 0 and 0.8, request at 0.4
    const Net net2 = line_net({{0.0}, {0.4}, {0.8}}, 0.3);
    GreedyFinite greedy2(net2, Problem::KServer, {0, 2});
    CHECK(greedy2.step({1}).first == 0);
}

TEST_CASE("marking on uniform metrics") {
    SECTION("k=1 always moves on a miss") {
        const Net net = uniform_corner_net(1, 2);
        MarkingKServer marking(net, {0}, 99);
        CHECK(marking.step({1}).second == 1.0);
        CHECK(marking.step({1}).second == 0.0);
    }
    SECTION("covered requests cost nothing") {
        const Net net = uniform_corner_net(2, 4);
        MarkingKServer marking(net, {0, 1, 2}, 99);
        Rng rng(3);
        for (int t = 0; t < 100; ++t) {
            const int q = static_cast<int>(rng.uniform_index(3));
            CHECK(marking.step({q}).second == 0.0);
        }
    }
    SECTION("non-uniform metric is rejected") {
        const Net net = line_net({{0.0}, {0.4}, {1.0}}, 0.3);
        CHECK_THROWS_AS(MarkingKServer(net, {0, 1}, 1), std::invalid_argument);
    }
    SECTION("empirical ratio against Belady stays in the harmonic band") {
        const int k = 8;
        const Net net = uniform_corner_net(4, k + 1);
        MarkingKServer marking(net, {0, 1, 2, 3, 4, 5, 6, 7}, 424242);
        Rng rng(515151);
        const size_t T = 100000;
        std::vector<int> requests(T);
        double marking_cost = 0.0;
        for (size_t t = 0; t < T; ++t) {
            requests[t] = static_cast<int>(rng.uniform_index(k + 1));
            marking_cost += marking.step({requests[t]}).second;
        }
        const std::vector<int> initial{0, 1, 2, 3, 4, 5, 6, 7};
        const double opt_cost = static_cast<double>(oracles::belady_miss_count(k + 1, initial, requests));
        const double hk = 1.0 + 1.0 / 2 + 1.0 / 3 + 1.0 / 4 + 1.0 / 5 + 1.0 / 6 + 1.0 / 7 + 1.0 / 8;
        const double ratio = marking_cost / opt_cost;
        CHECK(ratio >= hk / 2);
        CHECK(ratio <= 2 * hk);
    }
}

TEST_CASE("projection wrapper: detours, ledger identity, config invariant") {
    Rng rng(3030);
    for (Problem problem : {Problem::KServer, Problem::KTaxi, Problem::Chasing}) {
        Ball ball(NormedSpace(2, Norm::L2), {0.0, 0.0}, 1.0);
        Net net = build_eta_net(ball, 0.45);
        const double eta = net.eta;
        const int k = (problem == Problem::Chasing) ? 1 : 2;
        Configuration initial;
        for (int i = 0; i < k; ++i) initial.push_back({rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)});

        ProjectionWrapper wrapper(problem, std::move(net), initial,
                                  [problem](const Net& n, std::vector<int> ids) {
                                      return make_finite_algorithm("greedy", n, problem,
                                                                   std::move(ids), 0);
                                  });
        double detour_sum = 0.0;
        for (int t = 0; t < 60; ++t) {
            Request req;
            req.problem = problem;
            const int npts = (problem == Problem::KServer) ? 1 : (problem == Problem::KTaxi) ? 2 : 3;
            for (int j = 0; j < npts; ++j)
                req.points.push_back(sample_in_ball(rng, ball.space, ball.center, ball.radius));
            const auto res = wrapper.step(req);
            CHECK(res.detour <= 2.0 * eta + 1e-12);
            CHECK(res.step_cost == res.inner_cost + res.detour);
            CHECK(wrapper.config_matches_inner());
            detour_sum += res.detour;
        }
        const double identity = wrapper.ledger().total() - wrapper.inner_ledger().total() -
                                detour_sum - wrapper.initial_projection_cost();
        CHECK_THAT(identity, Catch::Matchers::WithinAbs(0.0, 1e-9));
    }
}

TEST_CASE("request at a net point has zero detour") {
    Ball ball(NormedSpace(1, Norm::L2), {0.0}, 1.0);
    Net net = build_eta_net(ball, 0.4);
    const Point target = net.points[1];
    ProjectionWrapper wrapper(Problem::KServer, std::move(net), {{0.0}},
                              [](const Net& n, std::vector<int> ids) {
                                  return make_finite_algorithm("greedy", n, Problem::KServer,
                                                               std::move(ids), 0);
                              });
    const auto res = wrapper.step(Request::server(target));
    CHECK(res.detour == 0.0);
}

TEST_CASE("sigma ensemble grid") {
    SECTION("k-server grid for k=4") {
        const SigmaGrid grid = sigma_ensemble_grid(Problem::KServer, 4);
        REQUIRE(grid.sigmas.size() == 2);  // l = ceil(log2 4) + 1 = 3 experts total
        CHECK(grid.sigmas[0] == 0.25);
        CHECK(grid.sigmas[1] == 0.0625);
        CHECK(grid.worst_case_slot);
    }
    SECTION("k-taxi grid extends to the floor") {
        CHECK_THROWS_AS(sigma_ensemble_grid(Problem::KTaxi, 2, 0.0), std::invalid_argument);
        const SigmaGrid grid = sigma_ensemble_grid(Problem::KTaxi, 2, std::pow(2.0, -8));
        CHECK(grid.sigmas == std::vector<double>{0.25, 0.0625, 0.00390625});
        CHECK_FALSE(grid.worst_case_slot);
    }
}

TEST_CASE("build_sigma_ensemble assembles experts") {
    Ball ball(NormedSpace(1, Norm::L2), {0.0}, 1.0);
    Configuration initial{{0.0}, {0.0}, {0.0}, {0.0}};
    ProjectionWrapper::InnerFactory factory = [](const Net& n, std::vector<int> ids) {
        return make_finite_algorithm("greedy", n, Problem::KServer, std::move(ids), 0);
    };
    const auto worst = [&](double finest_eta) {
        Net net = build_eta_net(ball, finest_eta / 2.0);
        return std::make_unique<ProjectionWrapper>(Problem::KServer, std::move(net), initial, factory);
    };

    SECTION("unknown sigma: l experts with the worst-case slot last") {
        const auto ens =
            build_sigma_ensemble(Problem::KServer, 4, ball, initial, false, 0.0, factory, worst);
        REQUIRE(ens.experts.size() == 3);
        CHECK(ens.expert_sigmas == std::vector<double>{0.25, 0.0625, 0.0});
        // eta shrinks along the grid
        CHECK(ens.experts[0]->net().eta > ens.experts[1]->net().eta);
    }
    SECTION("known sigma: a single expert, no combiner") {
        const auto ens =
            build_sigma_ensemble(Problem::KServer, 4, ball, initial, true, 0.5, factory, worst);
        CHECK(ens.experts.size() == 1);
        CHECK(ens.expert_sigmas == std::vector<double>{0.5});
    }
}

TEST_CASE("continuous greedy serves exactly and ties to the lowest id") {
    NormedSpace line(1, Norm::L2);
    ContinuousGreedy greedy(Problem::KServer, line, {{0.0}, {1.0}});
    const auto [dec, cost] = greedy.step(Request::server({0.4}));
    CHECK(dec == 0);
    CHECK_THAT(cost, Catch::Matchers::WithinAbs(0.4, 1e-12));
    CHECK(greedy.config()[0] == Point{0.4});

    ContinuousGreedy tie(Problem::KServer, line, {{0.0}, {0.8}});
    CHECK(tie.step(Request::server({0.4})).first == 0);
}
