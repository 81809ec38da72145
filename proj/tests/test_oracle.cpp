#include <doctest.h>

#include <cmath>

#include "brute_force.hpp"
#include "ruinlab/errors.hpp"
#include "ruinlab/oracle.hpp"
#include "ruinlab/series.hpp"

using namespace ruinlab;

TEST_SUITE("oracle") {

TEST_CASE("dp examples") {
    SUBCASE("certain loss run") {
        const auto r = ruin_probability_dp(0.0, 3, 3);
        CHECK(r.ruin_probability_within_horizon == 1.0);
        REQUIRE(r.expected_time_censored.has_value());
        CHECK(*r.expected_time_censored == 3.0);
        CHECK(r.survival_mass == 0.0);
    }
    SUBCASE("two losses in two trials") {
        const auto r = ruin_probability_dp(0.5, 2, 2);
        CHECK(r.ruin_probability_within_horizon == 0.25);
        CHECK(r.survival_mass == 0.75);
    }
    SUBCASE("long horizon reaches (q/p)^d") {
        const auto r = ruin_probability_dp(0.6, 3, 4000);
        CHECK(std::abs(r.ruin_probability_within_horizon - 8.0 / 27.0) < 1e-6);
    }
    SUBCASE("gains only never ruin") {
        const auto r = ruin_probability_dp(1.0, 2, 50);
        CHECK(r.ruin_probability_within_horizon == 0.0);
        CHECK_FALSE(r.expected_time_censored.has_value());
        CHECK(r.survival_mass == 1.0);
    }
    CHECK_THROWS_AS(ruin_probability_dp(0.5, 3, 2), DomainError);
    CHECK_THROWS_AS(ruin_probability_dp(0.5, 0, 2), DomainError);
    CHECK_THROWS_AS(ruin_probability_dp(-0.5, 1, 2), DomainError);
}

TEST_CASE("dp matches exhaustive path enumeration") {
    for (double p : {0.0, 0.2, 0.5, 0.65, 1.0}) {
        for (int d = 1; d <= 3; ++d) {
            for (int h = d; h <= 12; ++h) {
                CAPTURE(p);
                CAPTURE(d);
                CAPTURE(h);
                const double brute = ruinlab::testing::enumerate_ruin_probability(p, d, h);
                CHECK(std::abs(ruin_probability_dp(p, d, h).ruin_probability_within_horizon - brute) <
                      1e-12);
            }
        }
    }
}

TEST_CASE("dp matches the exact series truncated at the same path length") {
    for (double p : {0.3, 0.5, 0.7}) {
        for (int d = 1; d <= 5; ++d) {
            for (int h : {d, d + 7, 60, 301}) {
                const auto n = (h - d) / 2;
                const auto series = ruin_series(p, d, n, CoefficientMode::exact);
                const auto dp = ruin_probability_dp(p, d, h);
                CAPTURE(p);
                CAPTURE(d);
                CAPTURE(h);
                CHECK(std::abs(dp.ruin_probability_within_horizon - series.cumulative()) < 1e-10);
            }
        }
    }
}

TEST_CASE("dp mass balance and lattice parity") {
    for (double p : {0.1, 0.45, 0.5, 0.8}) {
        for (int d : {1, 2, 5}) {
            const auto r = ruin_probability_dp(p, d, 5000);
            CHECK(std::abs(r.ruin_probability_within_horizon + r.survival_mass - 1.0) < 1e-12);
            for (std::size_t t = 0; t < r.ruin_time_mass.size(); ++t) {
                if (static_cast<int>(t % 2) != d % 2 || static_cast<int>(t) < d) {
                    CHECK(r.ruin_time_mass[t] == 0.0);
                }
            }
        }
    }
}

TEST_CASE("dp is monotone in horizon and in p") {
    for (int d = 1; d <= 4; ++d) {
        double previous = 0.0;
        for (int h = d; h <= 200; h += 3) {
            const double r = ruin_probability_dp(0.52, d, h).ruin_probability_within_horizon;
            CHECK(r >= previous);
            previous = r;
        }
        double last = 2.0;
        for (double p = 0.0; p <= 1.0; p += 0.1) {
            const double r = ruin_probability_dp(p, d, 150).ruin_probability_within_horizon;
            CHECK(r <= last + 1e-15);
            last = r;
        }
    }
}

TEST_CASE("dp converges to the closed form at long horizons") {
    // Three representative cells of the d <= 3, p >= 0.55 family.
    const std::pair<double, int> cells[] = {{0.55, 3}, {0.6, 1}, {0.7, 2}};
    for (const auto& [p, d] : cells) {
        const auto r = ruin_probability_dp(p, d, 1'000'000);
        CAPTURE(p);
        CAPTURE(d);
        CHECK(std::abs(r.ruin_probability_within_horizon - ruin_probability_closed_form(p, d)) < 1e-5);
    }
}

TEST_CASE("closed form") {
    CHECK(ruin_probability_closed_form(0.5, 7) == 1.0);
    CHECK(ruin_probability_closed_form(0.2, 3) == 1.0);
    CHECK(ruin_probability_closed_form(1.0, 1) == 0.0);
    CHECK(ruin_probability_closed_form(0.0, 4) == 1.0);
    CHECK(ruin_probability_closed_form(0.6, 2) == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
    const auto dp = ruin_probability_dp(0.6, 2, 100'000);
    CHECK(std::abs(dp.ruin_probability_within_horizon - 4.0 / 9.0) < 1e-5);
}

TEST_CASE("paper time estimator is evaluated literally") {
    CHECK(expected_time_paper(0.0, 3) == 4.0);
    // 9/(1 - 2^-10) + 9 = 18.00879765395894428...
    CHECK(expected_time_paper(0.5, 10) == doctest::Approx(18.008797653958944).epsilon(1e-15));
    CHECK(expected_time_paper(0.5, 2) == doctest::Approx(7.0 / 3.0).epsilon(1e-15));
    CHECK(expected_time_paper(0.4, 3) == doctest::Approx(4.136752136752137).epsilon(1e-15));
    CHECK_THROWS_AS(expected_time_paper(1.0, 3), DomainError);
}

TEST_CASE("classical expected time") {
    CHECK(expected_time_classical(0.0, 5) == 5.0);
    CHECK(*expected_time_classical(0.4, 3) == doctest::Approx(15.0).epsilon(1e-14));
    CHECK_FALSE(expected_time_classical(0.5, 2).has_value());
    CHECK_FALSE(expected_time_classical(0.9, 2).has_value());
}

TEST_CASE("censored mean from the dp") {
    CHECK(expected_time_censored_dp(0.0, 4, 10) == 4.0);
    CHECK(std::abs(expected_time_censored_dp(0.4, 3, 10'000) - 15.0) < 0.01);
    // Paths L (1/2) and GLL (1/8): (1 * 0.5 + 3 * 0.125) / 0.625
    CHECK(expected_time_censored_dp(0.5, 1, 3) == doctest::Approx(1.4).epsilon(1e-15));
    CHECK_THROWS_AS(expected_time_censored_dp(1.0, 2, 10), DomainError);
}

}  // TEST_SUITE
