#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace bifront;
using Catch::Matchers::WithinAbs;
using support::certified;
using support::fisher_burgers;

namespace {

auto kind_is(ErrorKind k) {
    return Catch::Matchers::Predicate<Error>([k](const Error& e) { return e.kind() == k; });
}

} // namespace

TEST_CASE("regime classification", "[limits]") {
    CHECK(classify_regime(fisher_burgers(1.0)).regime == Regime::Case1);
    CHECK(classify_regime(fisher_burgers(0.5)).regime == Regime::Case1);
    CHECK(classify_regime(fisher_burgers(0.05)).regime == Regime::Case2);
    CHECK(classify_regime(fisher_burgers(-0.05)).regime == Regime::Case2);
    CHECK(classify_regime(fisher_burgers(-0.5)).regime == Regime::Case3);
    CHECK(classify_regime(support::logistic_power()).regime == Regime::Case1);
    CHECK(classify_regime(support::degenerate_fisher()).regime == Regime::Case1);
}

TEST_CASE("unmet hypotheses are reported, not guessed", "[limits]") {
    const auto rep = classify_regime(fisher_burgers(0.05), 10.0);
    CHECK(rep.regime == Regime::Unclassified);
    CHECK_FALSE(rep.note.empty());
    const auto ls = limit_speed(fisher_burgers(0.05));
    CHECK(ls.theorem_value);
}

TEST_CASE("v_plus", "[limits]") {
    CHECK_THAT(find_v_plus(fisher_burgers(0.05)), WithinAbs(certified("v_plus:alpha=0.05"), 1e-9));
    CHECK_THAT(find_v_plus(fisher_burgers(0.05)), WithinAbs(0.675, 1e-10));
    CHECK_THAT(find_v_plus(fisher_burgers(0.0)), WithinAbs(certified("v_plus:alpha=0"), 1e-9));
    CHECK_THAT(find_v_plus(fisher_burgers(-0.05)), WithinAbs(certified("v_plus:alpha=-0.05"), 1e-9));
    CHECK_THAT(find_v_plus(fisher_burgers(0.2)), WithinAbs(certified("v_plus:alpha=0.2"), 1e-9));
    CHECK_THROWS_MATCHES(find_v_plus(fisher_burgers(-0.5)), Error, kind_is(ErrorKind::ClassificationInconsistency));
}

TEST_CASE("limit speeds", "[limits]") {
    CHECK(limit_speed(fisher_burgers(1.0)).c_bar == 0.0);
    CHECK(limit_speed(fisher_burgers(0.5)).c_bar == 0.0);
    CHECK_THAT(limit_speed(fisher_burgers(-1.0 / 6.0)).c_bar, WithinAbs(1.0 / 3.0, 1e-9));
    CHECK_THAT(limit_speed(fisher_burgers(-0.5)).c_bar, WithinAbs(2.0 / 3.0, 1e-9));
    CHECK_THAT(limit_speed(fisher_burgers(0.05)).c_bar, WithinAbs(0.151875, 1e-9));
    CHECK_THAT(limit_speed(fisher_burgers(-0.05)).c_bar, WithinAbs(certified("sup_S:alpha=-0.05"), 1e-9));
}

TEST_CASE("case 2 identity at v_plus", "[limits]") {
    for (double alpha : {0.05, -0.05, 0.2}) {
        const Model m = fisher_burgers(alpha);
        const auto ls = limit_speed(m);
        REQUIRE(ls.v_plus.has_value());
        const double vp = *ls.v_plus;
        CHECK_THAT(ls.c_bar, WithinAbs(evaluate_S(m, vp), 1e-10));
        CHECK_THAT(ls.c_bar, WithinAbs(m.f(vp) - m.h_prime(vp), 1e-10));
    }
}

TEST_CASE("case 3 limit profile", "[limits]") {
    const auto a = limit_analysis(fisher_burgers(-0.5));
    const auto& p = a.limit_profile;
    CHECK(p.at(-2.0) == 0.0);
    CHECK_THAT(p.at(0.0), WithinAbs(0.5, 1e-15));
    CHECK_THAT(p.at(0.25), WithinAbs(0.75, 1e-15));
    CHECK(p.at(2.0) == 1.0);
    REQUIRE(a.kink_points.size() == 2);
    CHECK_THAT(a.kink_points[0], WithinAbs(-0.5, 1e-15));
    CHECK_THAT(a.kink_points[1], WithinAbs(0.5, 1e-15));
}

TEST_CASE("limit profiles are continuous at every joint", "[limits]") {
    for (const Model& m : {fisher_burgers(1.0), fisher_burgers(0.05), fisher_burgers(0.2), fisher_burgers(-0.5),
                           support::logistic_power(), support::degenerate_fisher()}) {
        const auto p = limit_profile(m);
        for (std::size_t i = 0; i + 1 < p.segments.size(); ++i) {
            const double z = p.segments[i].z_hi;
            CHECK_THAT(p.segments[i].at(z), WithinAbs(p.segments[i + 1].at(z), 1e-10));
        }
    }
}

TEST_CASE("case 2 gluing is C1 at the glue point", "[limits]") {
    for (double alpha : {0.05, -0.05, 0.2}) {
        const auto a = limit_analysis(fisher_burgers(alpha));
        REQUIRE(a.glue_point.has_value());
        const double z = *a.glue_point;
        const auto& p = a.limit_profile;
        const double h = 1e-5;
        const double left = (p.at(z) - p.at(z - h)) / h;
        const double right = (p.at(z + h) - p.at(z)) / h;
        INFO("alpha = " << alpha);
        CHECK_THAT(left, WithinAbs(1.0, 1e-6));
        CHECK_THAT(right, WithinAbs(left, 1e-4));
    }
}

TEST_CASE("case 2 layout for alpha = 0.05 and alpha = 0.2", "[limits]") {
    const auto a = limit_analysis(fisher_burgers(0.05));
    CHECK_THAT(*a.glue_point, WithinAbs(0.175, 1e-12));
    REQUIRE(a.kink_points.size() == 1);
    CHECK_THAT(a.kink_points[0], WithinAbs(-0.5, 1e-12));
    CHECK_THAT(a.limit_profile.at(0.0), WithinAbs(0.5, 1e-12));

    // v_plus < 1/2: the linear piece ends on the inviscid curve through (0, 1/2).
    const auto b = limit_analysis(fisher_burgers(0.2));
    REQUIRE(b.z_plus.has_value());
    const InviscidProfile vi(fisher_burgers(0.2), b.c_bar, 0.0, 0.5);
    CHECK_THAT(vi.v_of(*b.z_plus), WithinAbs(*b.v_plus, 1e-10));
    CHECK_THAT(b.kink_points[0], WithinAbs(*b.z_plus - *b.v_plus, 1e-12));
    CHECK(*b.z_plus < 0.0);
}

TEST_CASE("sharpness at zero in case 1", "[limits]") {
    SECTION("Fisher-Burgers alpha = 1: ell = 1/2, sharp") {
        const auto s = sharpness_at_zero(fisher_burgers(1.0));
        REQUIRE(s.ell.has_value());
        CHECK_THAT(*s.ell, WithinAbs(0.5, 1e-8));
        CHECK(s.sharp);
        CHECK_FALSE(s.inconclusive);
        const auto a = limit_analysis(fisher_burgers(1.0));
        REQUIRE(a.z0.has_value());
        CHECK_THAT(*a.z0, WithinAbs(-std::log(4.0), 1e-8));
    }
    SECTION("h = s^{3/2}: ell = 0, z0 finite") {
        const auto s = sharpness_at_zero(support::logistic_power());
        REQUIRE(s.ell.has_value());
        CHECK_THAT(*s.ell, WithinAbs(0.0, 1e-6));
        CHECK_FALSE(s.sharp);
        CHECK(s.z0_finite);
    }
    SECTION("f = s^2 (1 - s), h = s^2: ell = 0, z0 = -infinity") {
        const auto s = sharpness_at_zero(support::degenerate_fisher());
        REQUIRE(s.ell.has_value());
        CHECK_THAT(*s.ell, WithinAbs(0.0, 1e-6));
        CHECK_FALSE(s.z0_finite);
        const auto a = limit_analysis(support::degenerate_fisher());
        CHECK_FALSE(a.z0.has_value());
        CHECK(a.limit_profile.at(-50.0) > 0.0);
    }
}

TEST_CASE("inviscid profile", "[limits]") {
    const InviscidProfile vi(support::degenerate_fisher(), 0.0, 0.0, 0.5);
    CHECK_THAT(vi.v_of(2.0), WithinAbs(certified("inviscid:power-logistic-p2,z=2"), 1e-9));
    for (double v : {0.1, 0.3, 0.7, 0.95}) {
        CHECK_THAT(vi.v_of(vi.z_of(v)), WithinAbs(v, 1e-10));
    }
    CHECK_THROWS_MATCHES(vi.z_of(1.0), Error, kind_is(ErrorKind::Domain));
}

TEST_CASE("escape where c + h' vanishes", "[limits]") {
    // h' = -2 s (1 - s) and c = 0.4: c + h' < 0 on (0.2764, 0.7236).
    const Model m(Logistic{1.0}, PolynomialConvection{{0.0, 0.0, -1.0, 2.0 / 3.0}});
    const InviscidProfile vi(m, 0.4, 0.0, 0.9);
    REQUIRE(vi.escape_point().has_value());
    CHECK_THAT(*vi.escape_point(), WithinAbs(0.5 + std::sqrt(0.05), 1e-3));
}

TEST_CASE("linear piece identity in case 3", "[limits]") {
    const Model m = fisher_burgers(-0.5);
    const std::vector<double> eps{2e-3, 1e-3, 5e-4, 2.5e-4};
    SECTION("whole interval gives F(1) - h(1)") {
        const auto r = check_linear_piece_identity(m, eps, 0.0, 1.0);
        CHECK_THAT(r.identity_value, WithinAbs(2.0 / 3.0, 1e-12));
        CHECK(r.passed);
    }
    SECTION("inner interval") {
        const auto r = check_linear_piece_identity(m, eps, 0.25, 0.75);
        INFO("residual = " << r.residual);
        CHECK(r.residual <= 1e-3);
        CHECK(r.passed);
    }
    SECTION("empty interval is rejected") {
        CHECK_THROWS_MATCHES(check_linear_piece_identity(m, eps, 0.5, 0.5), Error, kind_is(ErrorKind::InvalidInput));
    }
}

TEST_CASE("distance to the limit profile shrinks with eps", "[limits]") {
    const Model m = fisher_burgers(1.0);
    const auto vbar = limit_profile(m);
    double prev = 1.0;
    for (double eps : {2e-3, 5e-4}) {
        const auto r = critical_speed(m, eps);
        const FrontProblem p(m, eps, r.trajectory_at_c_star.speed);
        const double d = distance_to_limit(reconstruct(r.trajectory_at_c_star, p), vbar);
        CHECK(d < prev);
        prev = d;
    }
}
