#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace bifront;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using support::certified;
using support::fisher_burgers;

TEST_CASE("lower bound is sup S clamped at zero", "[speed]") {
    CHECK_THAT(lower_bound(fisher_burgers(-0.5)), WithinAbs(certified("sup_S:alpha=-0.5"), 1e-9));
    CHECK_THAT(lower_bound(fisher_burgers(-0.5)), WithinAbs(2.0 / 3.0, 1e-12));
    CHECK(lower_bound(fisher_burgers(1.0)) == 0.0);
    CHECK_THAT(lower_bound(Model(Logistic{1.0}, ZeroConvection{})), WithinAbs(certified("sup_S:h=0"), 1e-9));
    CHECK_THAT(lower_bound(Model(Logistic{1.0}, ZeroConvection{})), WithinAbs(3.0 / 16.0, 1e-12));
    CHECK_THAT(lower_bound(fisher_burgers(0.05)), WithinAbs(certified("sup_S:alpha=0.05"), 1e-9));
    CHECK_THAT(lower_bound(fisher_burgers(-0.05)), WithinAbs(certified("sup_S:alpha=-0.05"), 1e-9));
    CHECK_THAT(lower_bound(fisher_burgers(-1.0 / 6.0)), WithinAbs(certified("sup_S:alpha=-1/6"), 1e-9));
}

TEST_CASE("upper bound", "[speed]") {
    CHECK_THAT(upper_bound(fisher_burgers(-0.5), 2e-3),
               WithinAbs(certified("upper_bound:alpha=-0.5,eps=2e-3"), 1e-6));
    CHECK_THAT(upper_bound(fisher_burgers(-0.5), 2e-3), WithinAbs(1.25 + 2 * std::sqrt(2e-3), 1e-6));
    CHECK_THAT(upper_bound(fisher_burgers(1.0), 2e-3), WithinAbs(0.25 + 2 * std::sqrt(2e-3), 1e-6));

    const Model m = fisher_burgers(0.3);
    double prev = upper_bound(m, 1.0);
    for (double eps = 0.5; eps > 1e-8; eps /= 2) {
        const double u = upper_bound(m, eps);
        CHECK(u < prev);
        prev = u;
    }
    CHECK_THAT(prev, WithinAbs(0.25, 1e-3));
}

TEST_CASE("bisection predicate", "[speed]") {
    CHECK(reaches_zero(Verdict::Admissible));
    CHECK(reaches_zero(Verdict::InteriorCrossing));
    CHECK_FALSE(reaches_zero(Verdict::TerminalPositive));
}

TEST_CASE("critical speeds of reference instances", "[speed]") {
    SECTION("alpha = -1/6, eps = 2e-3") {
        CHECK_THAT(critical_speed(fisher_burgers(-1.0 / 6.0), 2e-3).c_star, WithinAbs(0.336, 0.02));
    }
    SECTION("alpha = 1, eps = 2e-4") {
        CHECK_THAT(critical_speed(fisher_burgers(1.0), 2e-4).c_star, WithinAbs(0.024, 0.01));
    }
    SECTION("h = s^{3/2}, eps = 1e-2") {
        CHECK_THAT(critical_speed(support::logistic_power(), 1e-2).c_star, WithinAbs(0.143, 0.02));
    }
}

TEST_CASE("critical speed result invariants", "[speed]") {
    const Model m = fisher_burgers(0.05);
    const auto r = critical_speed(m, 2e-3);
    CHECK(r.final_bracket_width <= 1e-6);
    CHECK(r.c_lo <= r.c_star);
    CHECK(r.c_star <= r.c_hi);
    CHECK(r.c_star == 0.5 * (r.c_lo + r.c_hi));
    CHECK(r.bounds.lower <= r.c_star + 2e-6);
    CHECK(r.c_star <= r.bounds.upper + 2e-6);
    CHECK(r.trajectory_at_c_star.verdict == Verdict::Admissible);
    CHECK(r.trajectory_at_c_star.speed == r.c_hi);
    CHECK(r.iterations <= 60);

    const auto again = critical_speed(m, 2e-3);
    CHECK(again.c_star == r.c_star); // bit-for-bit
}

TEST_CASE("monotonicity in eps", "[speed]") {
    SECTION("alpha = 1 decreases from 0.07 to 0.024") {
        const auto rep = speed_monotonicity_check(fisher_burgers(1.0), {2e-3, 2e-4});
        CHECK(rep.monotone);
        REQUIRE(rep.rows.size() == 2);
        CHECK(rep.rows[0].c_star > rep.rows[1].c_star);
        CHECK_THAT(rep.rows[0].c_star, WithinAbs(0.07, 0.02));
        CHECK_THAT(rep.rows[1].c_star, WithinAbs(0.024, 0.01));
    }
    SECTION("alpha = -0.5 stays ordered above 2/3") {
        SpeedOptions opt;
        const auto rep = speed_monotonicity_check(fisher_burgers(-0.5), {2e-3, 1e-3, 5e-4}, opt);
        CHECK(rep.monotone);
        for (const auto& row : rep.rows) {
            CHECK(row.c_star >= 2.0 / 3.0 - 2 * opt.tol_c);
            CHECK_THAT(row.c_star, WithinAbs(2.0 / 3.0, 1e-3));
        }
    }
    SECTION("single eps is trivially monotone") {
        const auto rep = speed_monotonicity_check(fisher_burgers(1.0), {1e-2});
        CHECK(rep.monotone);
        CHECK(rep.rows.size() == 1);
    }
    SECTION("eps list must decrease") {
        CHECK_THROWS_AS(speed_monotonicity_check(fisher_burgers(1.0), {1e-3, 2e-3}), Error);
    }
}

TEST_CASE("pure convection admits speed zero for every eps", "[speed]") {
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        const auto r = critical_speed(support::pure_convection(), eps);
        CHECK_THAT(r.c_star, WithinAbs(0.0, 2e-6));
    }
}
