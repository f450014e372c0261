#include "ifslearn/copula.hpp"
#include "ifslearn/errors.hpp"
#include "ifslearn/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace ifsl;

namespace {

std::vector<Point> random_points(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Point> pts(n);
    for (auto& p : pts) p = {rng.next_double(), rng.next_double()};
    return pts;
}

} // namespace

TEST_CASE("transformation matrix validation") {
    CHECK_NOTHROW(TransformationMatrix({{0.25, 0.25}, {0.25, 0.25}}));
    CHECK_THROWS_AS(TransformationMatrix({{1.0, 0.0}, {0.0, 0.0}}), ValidationError);
    CHECK_THROWS_AS(TransformationMatrix({{0.5, 0.5}, {0.0, 0.0}}), ValidationError);
    CHECK_THROWS_AS(TransformationMatrix({{-0.1, 0.6}, {0.2, 0.3}}), ValidationError);
    CHECK_THROWS_AS(TransformationMatrix({{0.3, 0.3}, {0.3, 0.3}}), ValidationError);
    const auto u = TransformationMatrix::uniform(2, 2);
    CHECK(u.entry(0, 0) == doctest::Approx(0.25));
}

TEST_CASE("build_ifs uniform 2x2") {
    const auto ifs = build_ifs(TransformationMatrix::uniform(2, 2));
    REQUIRE(ifs.maps.size() == 4);
    for (std::size_t m = 0; m < 4; ++m) {
        CHECK(ifs.probs[m] == doctest::Approx(0.25));
        CHECK(ifs.maps[m].x_scale == doctest::Approx(0.5));
        CHECK(ifs.maps[m].y_scale == doctest::Approx(0.5));
    }
    // each quadrant appears exactly once as an image of the square
    std::vector<int> seen(4, 0);
    for (const auto& map : ifs.maps) {
        const Point c = map({0.5, 0.5});
        const int idx = (c.x > 0.5 ? 1 : 0) + (c.y > 0.5 ? 2 : 0);
        ++seen[static_cast<std::size_t>(idx)];
    }
    for (int s : seen) CHECK(s == 1);
}

TEST_CASE("build_ifs column breakpoints from cumulative sums") {
    // rows listed bottom to top: bottom row (0.2, 0.3), top row (0.1, 0.4)
    const TransformationMatrix u({{0.2, 0.3}, {0.1, 0.4}});
    const auto ifs = build_ifs(u);
    REQUIRE(ifs.col_breaks.size() == 3);
    CHECK(ifs.col_breaks[0] == doctest::Approx(0.0));
    CHECK(ifs.col_breaks[1] == doctest::Approx(0.3)); // first-column mass 0.2 + 0.1
    CHECK(ifs.col_breaks[2] == doctest::Approx(1.0));
    REQUIRE(ifs.row_breaks.size() == 3);
    CHECK(ifs.row_breaks[1] == doctest::Approx(0.5)); // bottom-row mass 0.2 + 0.3
    CHECK(ifs.maps.size() == 4);
    // maps contract into their rectangles
    for (const auto& map : ifs.maps) {
        for (const Point corner : {Point{0, 0}, Point{1, 0}, Point{0, 1}, Point{1, 1}}) {
            const Point q = map(corner);
            CHECK(q.x >= -1e-15);
            CHECK(q.x <= 1.0 + 1e-15);
            CHECK(q.y >= -1e-15);
            CHECK(q.y <= 1.0 + 1e-15);
        }
    }
}

TEST_CASE("closed-form copulas satisfy the axioms") {
    for (std::size_t g : {8u, 16u, 64u}) {
        CHECK_NOTHROW(independence_copula(g).check_axioms());
        CHECK_NOTHROW(comonotone_copula(g).check_axioms());
    }
}

TEST_CASE("invariant copula of the uniform matrix is independence") {
    const auto inv = invariant_copula(TransformationMatrix::uniform(2, 2), 64);
    CHECK_NOTHROW(inv.check_axioms());
    CHECK(d_inf(inv, independence_copula(64)) <= 1e-3);
}

TEST_CASE("invariant copula of the diagonal matrix is comonotone") {
    const TransformationMatrix diag({{0.5, 0.0}, {0.0, 0.5}});
    const auto inv = invariant_copula(diag, 64);
    CHECK_NOTHROW(inv.check_axioms());
    CHECK(d_inf(inv, comonotone_copula(64)) <= 2.0 / 64.0);
}

TEST_CASE("invariant copula is a push-forward fixed point") {
    const TransformationMatrix u({{0.2, 0.3}, {0.1, 0.4}});
    const auto inv = invariant_copula(u, 32, 1e-11);
    CHECK_NOTHROW(inv.check_axioms());
    const auto stepped = push_forward_step(u, inv);
    CHECK(d_inf(inv, stepped) < 1e-9);
}

TEST_CASE("push-forward preserves copula axioms") {
    const TransformationMatrix u({{0.2, 0.3}, {0.1, 0.4}});
    GridCopula c = independence_copula(32);
    for (int i = 0; i < 3; ++i) {
        c = push_forward_step(u, c);
        CHECK_NOTHROW(c.check_axioms());
    }
}

TEST_CASE("empirical copula hand example") {
    // no sample point is componentwise <= (0.1, 0.1), so C(1/2, 1/2) = 0
    const std::vector<Point> sample = {{0.1, 0.9}, {0.9, 0.1}};
    const auto emp = empirical_copula(sample, 2);
    CHECK(emp.value(1, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_NOTHROW(emp.check_axioms());
}

TEST_CASE("empirical copula of identical points") {
    const std::vector<Point> sample(7, Point{0.3, 0.6});
    const auto emp = empirical_copula(sample, 8);
    CHECK_NOTHROW(emp.check_axioms());
    // all ranks coincide: the sub-copula has only the corner nodes, where it
    // equals min(u, v); the bilinear extension of the corners is u v
    const std::size_t g = emp.grid_size();
    for (std::size_t p = 0; p <= g; ++p) {
        for (std::size_t q = 0; q <= g; ++q) {
            const double u = static_cast<double>(p) / static_cast<double>(g);
            const double v = static_cast<double>(q) / static_cast<double>(g);
            CHECK(emp.value(p, q) == doctest::Approx(u * v).epsilon(1e-12));
        }
    }
}

TEST_CASE("empirical copula rejects empty samples") {
    CHECK_THROWS_AS(empirical_copula({}, 8), ValidationError);
}

TEST_CASE("empirical copula satisfies the axioms on random samples") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto emp = empirical_copula(random_points(200, seed), 16);
        CHECK_NOTHROW(emp.check_axioms());
    }
}

TEST_CASE("empirical copula bounded difference under one-point replacement") {
    const std::size_t n = 50;
    auto sample = random_points(n, 99);
    const auto base = empirical_copula(sample, 16);
    Rng rng(7);
    for (int rep = 0; rep < 5; ++rep) {
        auto perturbed = sample;
        perturbed[static_cast<std::size_t>(rng.next_u64() % n)] = {rng.next_double(),
                                                                   rng.next_double()};
        const auto alt = empirical_copula(perturbed, 16);
        CHECK(d_inf(base, alt) <= 2.0 / static_cast<double>(n) + 1e-12);
    }
}

TEST_CASE("d_inf metric properties") {
    const auto pi = independence_copula(16);
    const auto m = comonotone_copula(16);
    CHECK(d_inf(pi, pi) == doctest::Approx(0.0));
    CHECK(d_inf(pi, m) == doctest::Approx(0.25)); // max of min(u,v) - uv at (1/2, 1/2)
    CHECK(d_inf(pi, m) == doctest::Approx(d_inf(m, pi)));
    CHECK_THROWS_AS(d_inf(pi, independence_copula(8)), ValidationError);
}

TEST_CASE("c_volume inclusion-exclusion") {
    const auto pi = independence_copula(16);
    CHECK(c_volume(pi, 0, 1, 0, 1) == doctest::Approx(1.0));
    CHECK(c_volume(pi, 0, 0.5, 0, 0.5) == doctest::Approx(0.25));
    CHECK(c_volume(pi, 0.25, 0.25, 0, 1) == doctest::Approx(0.0));
    CHECK_THROWS_AS(c_volume(pi, 0, 0.123, 0, 1), ValidationError);
}

TEST_CASE("Frechet bounds hold on produced copulas") {
    const auto inv = invariant_copula(TransformationMatrix({{0.2, 0.3}, {0.1, 0.4}}), 32);
    const std::size_t g = inv.grid_size();
    for (std::size_t p = 0; p <= g; ++p) {
        for (std::size_t q = 0; q <= g; ++q) {
            const double u = static_cast<double>(p) / static_cast<double>(g);
            const double v = static_cast<double>(q) / static_cast<double>(g);
            CHECK(inv.value(p, q) >= std::max(u + v - 1.0, 0.0) - 1e-10);
            CHECK(inv.value(p, q) <= std::min(u, v) + 1e-10);
        }
    }
}
