#include "ifslearn/chain.hpp"
#include "ifslearn/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

using namespace ifsl;

TEST_CASE("single-map chain contracts to the fixed point") {
    // one map with prob 1 into the lower-left cell of a 2x2 partition with
    // breakpoints at 0.5: fixed point is (0, 0)
    const TransformationMatrix u({{0.5, 0.25}, {0.1, 0.15}});
    auto ifs = build_ifs(u);
    // keep only the map whose image contains the origin: fixed point (0, 0)
    std::size_t origin_map = 0;
    for (std::size_t m = 0; m < ifs.maps.size(); ++m) {
        const Point q = ifs.maps[m]({0.0, 0.0});
        if (q.x == 0.0 && q.y == 0.0) origin_map = m;
    }
    const double factor =
        std::max(ifs.maps[origin_map].x_scale, ifs.maps[origin_map].y_scale);
    REQUIRE(factor < 1.0);
    ifs.maps = {ifs.maps[origin_map]};
    ifs.probs = {1.0};
    const auto traj = simulate_chain(ifs, {1.0, 1.0}, 80, 11);
    double prev = std::sqrt(2.0);
    for (const Point& p : traj.states) {
        const double dist = std::hypot(p.x, p.y);
        CHECK(dist <= factor * prev + 1e-12);
        prev = dist;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("same seed reproduces the trajectory bit for bit") {
    const auto ifs = build_ifs(TransformationMatrix::uniform(2, 2));
    const auto a = simulate_chain(ifs, {0.3, 0.7}, 500, 123);
    const auto b = simulate_chain(ifs, {0.3, 0.7}, 500, 123);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t t = 0; t < a.states.size(); ++t) {
        CHECK(a.states[t].x == b.states[t].x);
        CHECK(a.states[t].y == b.states[t].y);
        CHECK(a.map_indices[t] == b.map_indices[t]);
    }
}

TEST_CASE("trajectory replays from recorded map indices") {
    const auto ifs = build_ifs(TransformationMatrix({{0.2, 0.3}, {0.1, 0.4}}));
    const auto traj = simulate_chain(ifs, {0.5, 0.5}, 200, 77);
    Point x = traj.x0;
    for (std::size_t t = 0; t < traj.states.size(); ++t) {
        x = ifs.maps[traj.map_indices[t]](x);
        CHECK(x.x == traj.states[t].x);
        CHECK(x.y == traj.states[t].y);
        CHECK(x.x >= 0.0);
        CHECK(x.x <= 1.0);
        CHECK(x.y >= 0.0);
        CHECK(x.y <= 1.0);
    }
}

TEST_CASE("uniform matrix quadrant histogram is near uniform") {
    const auto ifs = build_ifs(TransformationMatrix::uniform(2, 2));
    const auto traj = simulate_chain(ifs, {0.12, 0.95}, 100000, 42);
    const auto hist = CellHistogram::from_points(traj.states, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(std::abs(hist.masses[i][j] - 0.25) < 0.01);
}

TEST_CASE("attach_observations basics") {
    const auto ifs = build_ifs(TransformationMatrix::uniform(2, 2));
    const auto traj = simulate_chain(ifs, {0.5, 0.5}, 1000, 5);
    const auto target = [](Point p) { return 0.5 * p.x - 0.25 * p.y; };

    SUBCASE("zero noise reproduces the target exactly") {
        const auto samples = attach_observations(traj, target, 0.0, 1.0, 9);
        REQUIRE(samples.size() == traj.states.size());
        for (std::size_t t = 0; t < samples.size(); ++t) {
            CHECK(samples[t].y == target(traj.states[t]));
            CHECK(samples[t].x.x == traj.states[t].x);
        }
    }
    SUBCASE("observations stay within the bound") {
        const auto samples = attach_observations(traj, target, 0.25, 1.0, 9);
        for (const auto& z : samples) CHECK(std::abs(z.y) <= 1.0);
    }
    SUBCASE("range exceeding the bound is rejected") {
        CHECK_THROWS_AS(attach_observations(traj, target, 0.6, 1.0, 9), ValidationError);
    }
    SUBCASE("pure-noise mean concentrates near zero") {
        int ok = 0;
        const int reps = 20;
        const double m = 1.0;
        const double n = static_cast<double>(traj.states.size());
        for (int r = 0; r < reps; ++r) {
            const auto samples =
                attach_observations(traj, [](Point) { return 0.0; }, m, m,
                                    static_cast<std::uint64_t>(100 + r));
            double mean = 0.0;
            for (const auto& z : samples) mean += z.y;
            mean /= n;
            if (std::abs(mean) <= 3.0 * m / std::sqrt(n)) ++ok;
        }
        CHECK(ok >= reps - 1); // 99%-style confidence over repeated seeding
    }
}

TEST_CASE("tv_distance basics") {
    CellHistogram p{2, {{0.25, 0.25}, {0.25, 0.25}}};
    CellHistogram q{2, {{1.0, 0.0}, {0.0, 0.0}}};
    CHECK(tv_distance(p, p) == doctest::Approx(0.0));
    CHECK(tv_distance(p, q) == doctest::Approx(0.75)); // point mass vs uniform: 1 - 1/4
    CHECK(tv_distance(p, q) == doctest::Approx(tv_distance(q, p)));
    CHECK_THROWS_AS(tv_distance(p, CellHistogram{3, {{1, 0, 0}, {0, 0, 0}, {0, 0, 0}}}),
                    ValidationError);
}

TEST_CASE("tv_distance triangle inequality") {
    CellHistogram a{2, {{0.4, 0.1}, {0.3, 0.2}}};
    CellHistogram b{2, {{0.1, 0.4}, {0.2, 0.3}}};
    CellHistogram c{2, {{0.25, 0.25}, {0.25, 0.25}}};
    CHECK(tv_distance(a, b) <= tv_distance(a, c) + tv_distance(c, b) + 1e-15);
    CHECK(tv_distance(a, b) >= 0.0);
    CHECK(tv_distance(a, b) <= 1.0);
}

TEST_CASE("mixing estimate for the uniform matrix") {
    const auto ifs = build_ifs(TransformationMatrix::uniform(2, 2));
    const auto est = estimate_mixing(ifs, 2, 0.25, 5, 20000, 6, 42);
    CHECK(est.t_mix == 1); // one step lands uniformly on the quadrants
    REQUIRE(est.d_curve.size() >= 2);
    CHECK(est.d_curve[1] < 0.02);
    // non-increasing up to Monte-Carlo tolerance
    const double tol = 3.0 / std::sqrt(static_cast<double>(est.n_reps));
    for (std::size_t t = 1; t < est.d_curve.size(); ++t)
        CHECK(est.d_curve[t] <= est.d_curve[t - 1] + tol);
}

TEST_CASE("epsilon = 1 gives t_mix = 0") {
    const auto ifs = build_ifs(TransformationMatrix::uniform(2, 2));
    const auto est = estimate_mixing(ifs, 2, 1.0, 2, 200, 3, 1);
    CHECK(est.t_mix == 0);
}

TEST_CASE("deterministic single-map orbit mixes when it enters the fixed cell") {
    const TransformationMatrix u({{0.5, 0.25}, {0.1, 0.15}});
    auto ifs = build_ifs(u);
    std::size_t origin_map = 0;
    for (std::size_t m = 0; m < ifs.maps.size(); ++m) {
        const Point q = ifs.maps[m]({0.0, 0.0});
        if (q.x == 0.0 && q.y == 0.0) origin_map = m;
    }
    ifs.maps = {ifs.maps[origin_map]}; // contraction into the lower-left cell
    ifs.probs = {1.0};
    const auto est = estimate_mixing(ifs, 2, 0.25, 3, 100, 6, 3);
    // on the breakpoint partition every orbit is in the fixed point's cell
    // after one step, matching the reference point mass
    CHECK(est.t_mix == 1);
}

TEST_CASE("not mixed within horizon raises with the curve attached") {
    // two maps, each the identity on its half: the chain never leaves the
    // starting half, so point-mass starts cannot approach the reference
    IfsSystem frozen;
    frozen.maps = {{0.0, 0.5, 0.0, 1.0}, {0.5, 0.5, 0.0, 1.0}};
    frozen.probs = {0.5, 0.5};
    frozen.col_breaks = {0.0, 0.5, 1.0};
    frozen.row_breaks = {0.0, 1.0};
    try {
        estimate_mixing(frozen, 2, 0.25, 4, 500, 4, 9);
        CHECK(false);
    } catch (const NotMixedError& e) {
        CHECK(e.d_curve.size() == 5);
        CHECK(e.d_curve.back() > 0.25);
    }
}

TEST_CASE("check_mixing_bounds report examples") {
    SUBCASE("instant mixing passes both bounds") {
        MixingEstimate est;
        est.d_curve = {1.0, 0.0, 0.0, 0.0};
        est.t_mix = 1;
        const auto rep = check_mixing_bounds(est, 20);
        CHECK(rep.decay_bound_ok);
        CHECK(rep.sum_bound_ok);
        CHECK(rep.all_ok());
    }
    SUBCASE("geometric curve satisfies the sum bound") {
        MixingEstimate est;
        est.t_mix = 1;
        for (int t = 0; t <= 20; ++t) est.d_curve.push_back(std::pow(2.0, -t));
        const auto rep = check_mixing_bounds(est, 20);
        CHECK(rep.sum_bound_ok);
        CHECK(rep.sum_margin >= 2.0); // sum < 2 <= 4 t_mix
    }
    SUBCASE("constant curve violates the decay bound at t = 3") {
        MixingEstimate est;
        est.d_curve = {0.3, 0.3, 0.3, 0.3, 0.3};
        est.t_mix = 1;
        const auto rep = check_mixing_bounds(est, 5);
        CHECK_FALSE(rep.decay_bound_ok);
        CHECK(rep.decay_first_violation == 3); // 2^{1-3} = 0.25 < 0.3
    }
}
