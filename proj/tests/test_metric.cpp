#include <catch2/catch_amalgamated.hpp>

#include "smoothbench/metric.hpp"
#include "smoothbench/rng.hpp"

using namespace smoothbench;

TEST_CASE("distance basics") {
    NormedSpace linf(2, Norm::Linf);
    CHECK(distance(linf, {0.0, 0.0}, {0.3, -0.5}) == 0.5);

    for (Norm n : {Norm::L1, Norm::L2, Norm::Linf}) {
        NormedSpace sp(3, n);
        const Point x{0.2, -0.7, 1.3};
        CHECK(distance(sp, x, x) == 0.0);
    }

    CHECK_THROWS_AS(distance(linf, {0.0}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("norm ordering L1 >= L2 >= Linf") {
    Rng rng(42);
    NormedSpace l1(4, Norm::L1), l2(4, Norm::L2), li(4, Norm::Linf);
    for (int i = 0; i < 1000; ++i) {
        Point x(4), y(4);
        for (int j = 0; j < 4; ++j) {
            x[j] = rng.uniform(-2.0, 2.0);
            y[j] = rng.uniform(-2.0, 2.0);
        }
        const double d1 = distance(l1, x, y), d2 = distance(l2, x, y), di = distance(li, x, y);
        CHECK(d1 >= d2 - 1e-12);
        CHECK(d2 >= di - 1e-12);
    }
}

TEST_CASE("triangle inequality and symmetry on random triples") {
    Rng rng(7);
    for (Norm n : {Norm::L1, Norm::L2, Norm::Linf}) {
        for (int m : {1, 2, 3}) {
            NormedSpace sp(m, n);
            for (int i = 0; i < 300; ++i) {
                Point a(m), b(m), c(m);
                for (int j = 0; j < m; ++j) {
                    a[j] = rng.uniform(-1.0, 1.0);
                    b[j] = rng.uniform(-1.0, 1.0);
                    c[j] = rng.uniform(-1.0, 1.0);
                }
                const double ab = distance(sp, a, b), bc = distance(sp, b, c), ac = distance(sp, a, c);
                CHECK(ac <= ab + bc + 1e-12 * (1.0 + ab + bc));
                CHECK(distance(sp, b, a) == ab);
            }
        }
    }
}

TEST_CASE("distance is translation invariant") {
    Rng rng(11);
    for (Norm n : {Norm::L1, Norm::L2, Norm::Linf}) {
        NormedSpace sp(3, n);
        for (int i = 0; i < 200; ++i) {
            Point a(3), b(3), shift(3);
            for (int j = 0; j < 3; ++j) {
                a[j] = rng.uniform(-1.0, 1.0);
                b[j] = rng.uniform(-1.0, 1.0);
                shift[j] = rng.uniform(-5.0, 5.0);
            }
            Point a2 = a, b2 = b;
            for (int j = 0; j < 3; ++j) {
                a2[j] += shift[j];
                b2[j] += shift[j];
            }
            CHECK_THAT(distance(sp, a2, b2),
                       Catch::Matchers::WithinRel(distance(sp, a, b), 1e-12));
        }
    }
}

TEST_CASE("aspect ratio") {
    NormedSpace line(1, Norm::L2);
    CHECK(aspect_ratio({line, {{0.0}, {1.0}}}) == 1.0);
    CHECK_THAT(aspect_ratio({line, {{0.0}, {0.25}, {1.0}}}), Catch::Matchers::WithinRel(4.0, 1e-12));
    CHECK_THROWS_AS(aspect_ratio({line, {{0.0}}}), std::invalid_argument);

    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        FiniteMetric fm{NormedSpace(2, Norm::L2), {}};
        for (int i = 0; i < 10; ++i) fm.points.push_back({rng.uniform(0, 1), rng.uniform(0, 1)});
        const double ar = aspect_ratio(fm);
        CHECK(ar >= 1.0);

        // invariant under uniform scaling
        FiniteMetric scaled = fm;
        for (auto& p : scaled.points)
            for (double& c : p) c *= 37.5;
        CHECK_THAT(aspect_ratio(scaled), Catch::Matchers::WithinRel(ar, 1e-12));
    }
}

TEST_CASE("ball membership and volume") {
    Ball cube(NormedSpace(2, Norm::Linf), {0.0, 0.0}, 1.0);
    CHECK(cube.contains({1.0, -1.0}));
    CHECK_FALSE(cube.contains({1.0 + 1e-12, 0.0}));

    // closed forms against Monte-Carlo in the bounding box
    Rng rng(99);
    for (Norm n : {Norm::L1, Norm::L2, Norm::Linf}) {
        NormedSpace sp(2, n);
        Ball ball(sp, {0.0, 0.0}, 1.0);
        int inside = 0;
        const int N = 200000;
        for (int i = 0; i < N; ++i) {
            Point p{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
            if (ball.contains(p)) ++inside;
        }
        const double est = 4.0 * inside / N;
        CHECK_THAT(ball_volume(sp, 1.0), Catch::Matchers::WithinAbs(est, 0.05));
    }
}

TEST_CASE("uniform ball sampling stays inside and fills the ball") {
    Rng rng(5);
    for (Norm n : {Norm::L1, Norm::L2, Norm::Linf}) {
        NormedSpace sp(3, n);
        Ball ball(sp, {0.5, -0.25, 0.0}, 0.8);
        double max_d = 0.0;
        for (int i = 0; i < 20000; ++i) {
            const Point p = sample_in_ball(rng, sp, ball.center, ball.radius);
            const double d = distance(sp, p, ball.center);
            CHECK(d <= ball.radius);
            max_d = std::max(max_d, d);
        }
        CHECK(max_d > 0.9 * ball.radius);
    }
}
