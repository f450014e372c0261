#include "ifslearn/bounds.hpp"
#include "ifslearn/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace ifsl;

namespace {

BoundParams default_params() {
    return BoundParams::create(0.75, 0.1, 1.0, 1.0, 1.0, 5000, 0.2, 0.5, 1.0, 0.4);
}

} // namespace

TEST_CASE("bound parameter construction") {
    const auto p = default_params();
    CHECK(p.kappa == doctest::Approx(0.1 / 1.1));
    CHECK(p.c == doctest::Approx(30.0));
    CHECK(p.c_prime == doctest::Approx(4.0 * 30.0)); // 4 c (M C_k^2)^2, M = C_k = 1
    CHECK(p.c_one == doctest::Approx(2.0 * std::sqrt(30.0)));
    CHECK(p.c_one * p.c_one == doctest::Approx(p.c_prime)); // c_1^2 = c'
    // sigma^2 = (2 M C_k^2 (lambda + C_k^2) / lambda)^2 = 22^2
    CHECK(p.sigma_sq == doctest::Approx(484.0));
}

TEST_CASE("coefficient product lemma") {
    SUBCASE("hand value at kappa = 1, theta = 1") {
        const auto pb = coeff_product(1.0, 1.0, 1, 3);
        CHECK(pb.exact == doctest::Approx(1.0 / 3.0)); // (1 - 1/2)(1 - 1/3)
        CHECK(pb.bound == doctest::Approx(0.5));       // (k+1)/(T+1) = 2/4
        CHECK(pb.exact <= pb.bound);
    }
    SUBCASE("empty product convention") {
        const auto pb = coeff_product(0.5, 0.75, 7, 7);
        CHECK(pb.exact == doctest::Approx(1.0));
    }
    SUBCASE("factor hitting zero is a domain error") {
        // kappa / 1^theta = 1 makes the first factor zero only when the product
        // starts at i = 1; starting at i = 2 keeps all factors positive
        CHECK_NOTHROW(coeff_product(1.0, 1.0, 1, 10));
        CHECK_THROWS_AS(coeff_product(1.0, 0.75, 0, 10), DomainError);
    }
    SUBCASE("bound holds on the full grid") {
        std::size_t violations = 0;
        for (double kappa = 0.1; kappa <= 1.0 + 1e-9; kappa += 0.1) {
            for (double theta : {0.55, 0.65, 0.75, 0.85, 0.95, 1.0}) {
                for (std::size_t T : {10u, 100u, 1000u, 10000u}) {
                    for (std::size_t k : {std::size_t{1}, std::size_t{2}, std::size_t{5}, T / 2, T - 1}) {
                        const auto pb = coeff_product(kappa, theta, k, T);
                        if (pb.exact > pb.bound * (1.0 + 1e-12)) ++violations;
                    }
                }
            }
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("coefficient sum lemma") {
    SUBCASE("telescoping hand value at kappa = 1, theta = 1") {
        // prod_{i=k+1}^{T} (1 - 1/i) = k/T, so the sum is sum (1/k)(k/10) = 1
        const auto sb = coeff_sum(1.0, 1.0, 10);
        CHECK(sb.exact == doctest::Approx(1.0));
        CHECK(sb.bound == doctest::Approx(3.0));
    }
    SUBCASE("T = 1") {
        const auto sb = coeff_sum(0.4, 0.75, 1);
        CHECK(sb.exact == doctest::Approx(1.0));
        CHECK(sb.bound == doctest::Approx(3.0 / 0.4));
    }
    SUBCASE("bound holds on the full grid") {
        std::size_t violations = 0;
        for (double kappa = 0.1; kappa <= 1.0 + 1e-9; kappa += 0.1) {
            for (double theta : {0.55, 0.65, 0.75, 0.85, 0.95, 1.0}) {
                for (std::size_t T : {10u, 100u, 1000u, 10000u}) {
                    const auto sb = coeff_sum(kappa, theta, T);
                    if (sb.exact > sb.bound * (1.0 + 1e-12)) ++violations;
                }
            }
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("gradient sum bound constants") {
    SUBCASE("hand values at theta = 1, t_mix = 1, sigma^2 = 1") {
        const auto gb = grad_sum_bound(1.0, 1.0, 1.0);
        CHECK(gb.proof == doctest::Approx(26.0));      // 2 (3 + 2 * 5)
        CHECK(gb.statement == doctest::Approx(46.0));  // 2 (3 + 4 * 5)
        CHECK(gb.simplified == doctest::Approx(30.0)); // 30 theta t_mix / (2 theta - 1)
        CHECK(gb.proof <= gb.simplified);
    }
    SUBCASE("theta = 3/4 doubles through the 2 theta - 1 divisor") {
        const auto a = grad_sum_bound(1.0, 1.0, 2.0);
        const auto b = grad_sum_bound(1.0, 0.75, 2.0);
        // divisor halves: compare the simplified forms scaled by theta
        CHECK(b.simplified == doctest::Approx(2.0 * 30.0 * 0.75 * 2.0));
        CHECK(a.simplified == doctest::Approx(30.0 * 2.0));
    }
    SUBCASE("theta at or below 1/2 is rejected") {
        CHECK_THROWS_AS(grad_sum_bound(1.0, 0.5, 1.0), DomainError);
    }
}

TEST_CASE("initialization error term") {
    SUBCASE("zero initial distance") {
        CHECK(e_init(0.75, 0.5, 100, 0.0) == doctest::Approx(0.0));
    }
    SUBCASE("theta = 1 closed form at T = 2") {
        // 2^{kappa^2 + 1} / T^{kappa^2} with kappa = 1: 4/2 = 2
        CHECK(e_init(1.0, 1.0, 2, 0.7) == doctest::Approx(2.0 * 0.7));
    }
    SUBCASE("strictly decreasing in T") {
        for (double theta : {0.6, 0.75, 1.0}) {
            CHECK(e_init(theta, 0.3, 1000, 1.0) < e_init(theta, 0.3, 100, 1.0));
            CHECK(e_init(theta, 0.3, 100, 1.0) < e_init(theta, 0.3, 10, 1.0));
        }
    }
    SUBCASE("vanishes as T grows for theta < 1") {
        CHECK(e_init(0.75, 0.3, 100000000, 1.0) < 1e-6);
    }
}

TEST_CASE("sampling error constants") {
    SUBCASE("large-T limit of C_theta_lambda") {
        auto p = default_params();
        p.T = 100000000;
        const auto sc = e_samp_constants(p);
        const double limit =
            3.0 * p.c_prime * p.theta / (p.lambda * p.lambda * (2.0 * p.theta - 1.0));
        CHECK(sc.c_theta_lambda == doctest::Approx(limit).epsilon(1e-4));
    }
    SUBCASE("finite positive values at the defaults") {
        const auto sc = e_samp_constants(default_params());
        CHECK(sc.c_theta_lambda > 0.0);
        CHECK(sc.b_theta_lambda > 0.0);
        CHECK(std::isfinite(sc.c_theta_lambda));
        CHECK(std::isfinite(sc.b_theta_lambda));
    }
    SUBCASE("theta = 1 variant is finite") {
        auto p = BoundParams::create(1.0, 0.1, 1.0, 1.0, 1.0, 5000, 0.2, 0.5, 1.0, 0.4);
        const auto sc = e_samp_constants(p);
        CHECK(sc.c_theta_lambda > 0.0);
        CHECK(std::isfinite(sc.b_theta_lambda));
    }
}

TEST_CASE("total bound structure") {
    SUBCASE("only the sampling term survives zero norms") {
        auto p = default_params();
        p.g_norm = 0.0;
        p.dist0_sq = 0.0;
        const auto sc = e_samp_constants(p);
        const double expect =
            (1.0 / std::sqrt(p.delta)) * sc.b_theta_lambda * std::sqrt(p.t_mix);
        CHECK(total_bound(p) == doctest::Approx(expect));
    }
    SUBCASE("approximation term scales as lambda^beta g_norm") {
        auto a = default_params();
        auto b = default_params();
        b.g_norm = a.g_norm + 1.0;
        CHECK(total_bound(b) - total_bound(a) ==
              doctest::Approx(std::pow(a.lambda, a.beta)));
    }
}

TEST_CASE("markov inequality self-test") {
    const std::vector<double> values = {0.0, 0.1, 0.2, 0.5, 1.0, 2.0, 0.05, 0.3};
    for (double eps : {0.01, 0.1, 0.5, 1.0, 3.0}) CHECK(markov_check(values, eps));
}

TEST_CASE("validate_bounds replicate statistics") {
    SUBCASE("too few replicates are rejected") {
        std::vector<IterateTrace> traces(5);
        CHECK_THROWS_AS(validate_bounds(traces, default_params()), ValidationError);
    }
    SUBCASE("synthetic identical replicates") {
        // identical replicates: Jensen holds with equality, quantile fraction 0
        IterateTrace trace;
        IterateRecord first;
        first.t = 1;
        first.l2_error = 0.2;
        IterateRecord last;
        last.t = 2;
        last.l2_error = 0.01;
        trace.records = {first, last};
        const std::vector<IterateTrace> traces(40, trace);
        const auto report = validate_bounds(traces, default_params());
        CHECK(report.n_replicates == 40);
        CHECK(report.mean_initial_sq == doctest::Approx(0.04));
        CHECK(report.mean_final_sq == doctest::Approx(0.0001));
        CHECK(report.mean_final_norm == doctest::Approx(0.01));
        CHECK(report.sqrt_mean_final_sq == doctest::Approx(0.01));
        CHECK(report.jensen_ok);
        CHECK(report.reduction_ok);
        CHECK(report.quantile_fraction == doctest::Approx(0.0));
        CHECK(report.quantile_cap == doctest::Approx(0.2 + 2.0 / std::sqrt(40.0)));
        CHECK(report.mean_bound_ok); // theoretical threshold is far above 1e-4
    }
}
