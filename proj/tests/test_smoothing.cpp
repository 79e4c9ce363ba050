#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "smoothbench/smoothing.hpp"

using namespace smoothbench;

namespace {
GeneratorDescriptor uniform_desc(Problem p, int k) {
    GeneratorDescriptor d;
    d.kind = GeneratorKind::UniformBall;
    d.problem = p;
    d.k = k;
    return d;
}
}  // namespace

TEST_CASE("sigma certificates") {
    Ball line_ball(NormedSpace(1, Norm::L2), {0.0}, 1.0);
    CHECK(sigma_of_generator(uniform_desc(Problem::KServer, 2), line_ball) == 1.0);

    GeneratorDescriptor pert;
    pert.kind = GeneratorKind::PerturbedBase;
    pert.problem = Problem::KServer;
    pert.rho = 0.1;
    CHECK_THAT(sigma_of_generator(pert, line_ball), Catch::Matchers::WithinRel(0.1, 1e-12));

    pert.rho = 0.0;
    CHECK_THROWS_AS(sigma_of_generator(pert, line_ball), std::invalid_argument);
    pert.rho = 1.5;
    CHECK_THROWS_AS(sigma_of_generator(pert, line_ball), std::invalid_argument);

    GeneratorDescriptor lb;
    lb.kind = GeneratorKind::LowerBoundHypercube;
    lb.problem = Problem::KServer;
    lb.k = 3;
    const auto inst = HypercubeInstance::make(3);
    Ball cube = inst.ball();
    const double eps = 1.0 / (6.0 * std::log2(3.0));
    CHECK_THAT(inst.eps, Catch::Matchers::WithinRel(eps, 1e-12));
    CHECK_THAT(sigma_of_generator(lb, cube), Catch::Matchers::WithinRel(4.0 * eps * eps, 1e-12));
    CHECK_THAT(sigma_of_generator(lb, cube), Catch::Matchers::WithinAbs(0.04423, 5e-6));

    GeneratorDescriptor scripted;
    scripted.kind = GeneratorKind::Scripted;
    CHECK_THROWS_AS(sigma_of_generator(scripted, line_ball), std::invalid_argument);
}

TEST_CASE("perturbed samples stay in the support") {
    Ball ball(NormedSpace(1, Norm::L2), {0.5}, 0.5);  // [0, 1]
    GeneratorDescriptor pert;
    pert.kind = GeneratorKind::PerturbedBase;
    pert.problem = Problem::KServer;
    pert.rho = 0.1;
    pert.base_points = {{0.5}};
    Rng rng(10);
    std::vector<Request> history;
    for (int t = 0; t < 2000; ++t) {
        const Request r = sample_request(pert, ball, history, rng);
        CHECK(r.points[0][0] >= 0.4);
        CHECK(r.points[0][0] <= 0.6);
        history.push_back(r);
    }

    // base outside the inner ball is rejected
    GeneratorDescriptor bad = pert;
    bad.base_points = {{0.95}};
    CHECK_THROWS_AS(sample_request(bad, ball, history, rng), std::invalid_argument);
}

TEST_CASE("hypercube samples are near vertices with uniform frequencies") {
    GeneratorDescriptor lb;
    lb.kind = GeneratorKind::LowerBoundHypercube;
    lb.problem = Problem::KServer;
    lb.k = 3;
    const auto inst = HypercubeInstance::make(3);
    const Ball ball = inst.ball();
    Rng rng(20);
    std::vector<Request> history;
    std::vector<int> counts(inst.k + 1, 0);
    const int N = 100000;
    for (int i = 0; i < N; ++i) {
        const Request r = sample_request(lb, ball, history, rng);
        const int v = inst.vertex_of(r.points[0]);
        CHECK(distance(ball.space, r.points[0], inst.vertices[v]) <= inst.eps);
        ++counts[v];
    }
    const double expect = static_cast<double>(N) / (inst.k + 1);
    const double se = std::sqrt(expect * (1.0 - 1.0 / (inst.k + 1)));
    for (int v = 0; v <= inst.k; ++v) CHECK(std::abs(counts[v] - expect) <= 3.0 * se + 1.0);
}

TEST_CASE("hypercube taxi and chasing payloads") {
    const auto inst = HypercubeInstance::make(4);
    const Ball ball = inst.ball();
    Rng rng(30);
    std::vector<Request> history;

    GeneratorDescriptor taxi;
    taxi.kind = GeneratorKind::LowerBoundHypercube;
    taxi.problem = Problem::KTaxi;
    taxi.k = 4;
    for (int i = 0; i < 2000; ++i) {
        const Request r = sample_request(taxi, ball, history, rng);
        CHECK(inst.vertex_of(r.points[0]) == inst.vertex_of(r.points[1]));
    }

    GeneratorDescriptor chase;
    chase.kind = GeneratorKind::LowerBoundHypercube;
    chase.problem = Problem::Chasing;
    chase.k = 4;
    for (int i = 0; i < 2000; ++i) {
        const Request r = sample_request(chase, ball, history, rng);
        REQUIRE(r.points.size() == 4);
        std::vector<char> seen(inst.k + 1, 0);
        int far_count = 0;
        for (const auto& p : r.points) {
            const int v = inst.vertex_of(p);
            CHECK(distance(ball.space, p, inst.vertices[v]) <= inst.eps);
            CHECK_FALSE(seen[v]);  // distinct vertices
            seen[v] = 1;
        }
        for (int v = 0; v <= inst.k; ++v)
            if (!seen[v]) ++far_count;
        CHECK(far_count == 1);  // exactly one far vertex
    }
}

TEST_CASE("empirical density respects the certificate on axis cells") {
    // P(C) <= vol(C)/(sigma vol(B)) + 4 SE for axis-aligned cells.
    struct Case {
        GeneratorDescriptor desc;
        Ball ball;
    };
    std::vector<Case> cases;
    {
        Case c{uniform_desc(Problem::KServer, 1), Ball(NormedSpace(2, Norm::Linf), {0.0, 0.0}, 1.0)};
        cases.push_back(c);
        GeneratorDescriptor pert;
        pert.kind = GeneratorKind::PerturbedBase;
        pert.problem = Problem::KServer;
        pert.rho = 0.4;
        pert.base_points = {{0.2, -0.1}};
        cases.push_back({pert, Ball(NormedSpace(2, Norm::Linf), {0.0, 0.0}, 1.0)});
    }
    Rng cell_rng(808);
    for (auto& [desc, ball] : cases) {
        const double sigma = sigma_of_generator(desc, ball);
        Rng rng(909);
        std::vector<Request> history;
        const int N = 100000;
        std::vector<Point> samples;
        samples.reserve(N);
        for (int i = 0; i < N; ++i)
            samples.push_back(sample_request(desc, ball, history, rng).points[0]);
        for (int cell = 0; cell < 12; ++cell) {
            const double side = cell_rng.uniform(0.05, 0.3);
            Point lo{cell_rng.uniform(-0.9, 0.9 - side), cell_rng.uniform(-0.9, 0.9 - side)};
            int hits = 0;
            for (const auto& p : samples)
                if (p[0] >= lo[0] && p[0] <= lo[0] + side && p[1] >= lo[1] && p[1] <= lo[1] + side)
                    ++hits;
            const double cell_vol = side * side;
            const double bound = cell_vol / (sigma * ball_volume(ball.space, ball.radius));
            const double p_hat = static_cast<double>(hits) / N;
            const double se = std::sqrt(std::max(bound, p_hat) * 1.0 / N);
            CHECK(p_hat <= bound + 4.0 * se + 1e-9);
        }
    }
}

TEST_CASE("offline bound values") {
    CHECK_THAT(opt_amortized_bound(Problem::KServer, 1.0, 2, 1, 1.0),
               Catch::Matchers::WithinRel(0.0078125, 1e-12));
    CHECK_THAT(opt_amortized_bound(Problem::Chasing, 1.0, 1, 1, 1.0),
               Catch::Matchers::WithinRel(0.25, 1e-12));
    CHECK_THROWS_AS(opt_amortized_bound(Problem::KServer, 0.0, 2, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(opt_amortized_bound(Problem::KServer, 1.5, 2, 1, 1.0), std::invalid_argument);

    // monotone in m toward R/8
    double prev = 0.0;
    for (int m = 1; m <= 40; ++m) {
        const double b = opt_amortized_bound(Problem::KServer, 0.5, 4, m, 1.0);
        CHECK(b >= prev);
        prev = b;
    }
    CHECK_THAT(prev, Catch::Matchers::WithinAbs(1.0 / 8.0, 0.02));
}

TEST_CASE("choose_eta values and the 3-delta identity") {
    CHECK_THAT(choose_eta(Problem::KServer, 1.0, 1, 1, 1.0),
               Catch::Matchers::WithinRel(0.375, 1e-12));
    const double chase_eta = choose_eta(Problem::Chasing, 1.0, 2, 2, 1.0);
    CHECK_THAT(chase_eta, Catch::Matchers::WithinRel(3.0 * std::sqrt(1.0 / 8.0), 1e-12));
    CHECK(chase_eta > 1.0);  // singleton-net regime

    Rng rng(111);
    for (int i = 0; i < 200; ++i) {
        const double sigma = rng.uniform(0.01, 1.0);
        const int k = 1 + static_cast<int>(rng.uniform_index(8));
        const int m = 1 + static_cast<int>(rng.uniform_index(3));
        const double R = rng.uniform(0.5, 2.0);
        // exact algebraic identity: eta = 3 * delta = 3 * (8 or 2) * bound
        CHECK(choose_eta(Problem::KServer, sigma, k, m, R) ==
              24.0 * opt_amortized_bound(Problem::KServer, sigma, k, m, R));
        CHECK(choose_eta(Problem::Chasing, sigma, k, m, R) ==
              6.0 * opt_amortized_bound(Problem::Chasing, sigma, k, m, R));
        CHECK(choose_eta(Problem::KTaxi, sigma, k, m, R) ==
              choose_eta(Problem::KServer, sigma, k, m, R));
    }
}

TEST_CASE("delta separated growth") {
    NormedSpace line(1, Norm::L2);

    SECTION("identical requests collapse to one") {
        std::vector<Request> window(8, Request::server({0.5}));
        const auto log = delta_separated_growth(Problem::KServer, line, window, 0.1);
        CHECK(log.final_size == 1);
        CHECK(log.inserted[0]);
    }
    SECTION("well separated requests all enter") {
        std::vector<Request> window;
        for (int i = 0; i < 8; ++i) window.push_back(Request::server({static_cast<double>(i)}));
        const auto log = delta_separated_growth(Problem::KServer, line, window, 0.5);
        CHECK(log.final_size == 8);
    }
    SECTION("taxi variant keys on destinations of all earlier requests") {
        std::vector<Request> window{Request::taxi({0.0}, {1.0}), Request::taxi({1.0}, {2.0}),
                                    Request::taxi({5.0}, {0.0})};
        const auto log = delta_separated_growth(Problem::KTaxi, line, window, 0.5);
        // r2's pickup 1.0 is exactly the first drop-off -> skipped;
        // r3's pickup 5.0 is far from both drop-offs -> inserted.
        CHECK(log.inserted == std::vector<char>{1, 0, 1});
        CHECK(log.final_size == 2);
    }
    SECTION("chasing variant is not defined") {
        std::vector<Request> window{Request::chase({{0.0}})};
        CHECK_THROWS_AS(delta_separated_growth(Problem::Chasing, line, window, 0.1),
                        std::invalid_argument);
    }
}

TEST_CASE("growth diagnostic hits the lemma rates on uniform instances") {
    const int k = 4;
    for (int m : {1, 2}) {
        NormedSpace sp(m, Norm::L2);
        Ball ball(sp, Point(m, 0.0), 1.0);
        const double delta = ball.radius * std::pow(1.0 / (8.0 * k), 1.0 / m);
        Rng rng(777 + m);
        GeneratorDescriptor desc = uniform_desc(Problem::KServer, k);
        int windows_big = 0, inserts = 0, steps = 0;
        const int W = 500;
        for (int w = 0; w < W; ++w) {
            std::vector<Request> window, history;
            for (int i = 0; i < 4 * k; ++i)
                window.push_back(sample_request(desc, ball, history, rng));
            const auto log = delta_separated_growth(Problem::KServer, sp, window, delta);
            if (log.final_size >= 2 * static_cast<size_t>(k)) ++windows_big;
            for (char c : log.inserted) inserts += c;
            steps += static_cast<int>(log.inserted.size());
        }
        const double insert_rate = static_cast<double>(inserts) / steps;
        const double big_rate = static_cast<double>(windows_big) / W;
        const double se_insert = std::sqrt(0.25 / steps);
        const double se_big = std::sqrt(0.25 / W);
        CHECK(insert_rate >= 0.5 - 3.0 * se_insert);
        CHECK(big_rate >= 0.5 - 3.0 * se_big);
    }
}

TEST_CASE("chasing consecutive sets stay delta-separated often enough") {
    const int k = 3;
    NormedSpace sp(2, Norm::L2);
    Ball ball(sp, {0.0, 0.0}, 1.0);
    const double delta = ball.radius * std::pow(1.0 / (2.0 * k * k), 1.0 / 2);
    GeneratorDescriptor desc = uniform_desc(Problem::Chasing, k);
    desc.chase_set_size = k;
    Rng rng(999);
    int close = 0;
    const int N = 3000;
    std::vector<Request> history;
    Request prev = sample_request(desc, ball, history, rng);
    for (int t = 0; t < N; ++t) {
        const Request cur = sample_request(desc, ball, history, rng);
        bool any_close = false;
        for (const auto& p : prev.points)
            for (const auto& q : cur.points)
                if (distance(sp, p, q) <= delta) any_close = true;
        if (any_close) ++close;
        prev = cur;
    }
    const double rate = static_cast<double>(close) / N;
    CHECK(rate <= 0.5 + 3.0 * std::sqrt(0.25 / N));
}

TEST_CASE("adaptive adversary wiring") {
    // A descriptor-per-step callback that stops after 5 steps.
    Ball ball(NormedSpace(1, Norm::L2), {0.0}, 1.0);
    AdaptiveAdversary adversary = [&](const std::vector<Request>& history)
        -> std::optional<GeneratorDescriptor> {
        if (history.size() >= 5) return std::nullopt;
        GeneratorDescriptor d;
        d.kind = GeneratorKind::PerturbedBase;
        d.problem = Problem::KServer;
        d.rho = 0.2;
        d.base_schedule = "farthest";
        return d;
    };
    Rng rng(1);
    std::vector<Request> history;
    while (auto desc = adversary(history)) {
        history.push_back(sample_request(*desc, ball, history, rng));
        CHECK(ball.contains(history.back().points[0]));
    }
    CHECK(history.size() == 5);
}
