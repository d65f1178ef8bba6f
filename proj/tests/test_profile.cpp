#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace bifront;
using Catch::Matchers::WithinAbs;
using support::fisher_burgers;

namespace {

auto kind_is(ErrorKind k) {
    return Catch::Matchers::Predicate<Error>([k](const Error& e) { return e.kind() == k; });
}

struct Critical {
    Model model;
    YTrajectory traj;
    FrontProblem problem;
};

Critical critical(const Model& m, double eps) {
    auto r = critical_speed(m, eps);
    FrontProblem p(m, eps, r.trajectory_at_c_star.speed);
    return {m, std::move(r.trajectory_at_c_star), std::move(p)};
}

} // namespace

TEST_CASE("critical profiles are normalized, monotone and subluminal", "[profile]") {
    for (double alpha : {1.0, 0.05, -0.5}) {
        const auto c = critical(fisher_burgers(alpha), 2e-3);
        const auto prof = reconstruct(c.traj, c.problem);
        CHECK_THAT(prof.v_at(0.0), WithinAbs(0.5, 1e-8));
        CHECK(z_of_v(c.traj, 0.5) == 0.0);
        for (std::size_t i = 0; i < prof.z.size(); ++i) {
            CHECK((prof.dv[i] > 0.0 && prof.dv[i] < 1.0));
            if (i > 0) {
                CHECK(prof.v[i] > prof.v[i - 1]);
                CHECK(prof.z[i] > prof.z[i - 1]);
            }
        }
        CHECK(roundtrip_y_error(prof, c.traj) <= 1e-6);
    }
}

TEST_CASE("near-sharp interior for alpha = -0.5", "[profile]") {
    const auto c = critical(fisher_burgers(-0.5), 2e-3);
    const auto prof = reconstruct(c.traj, c.problem);
    CHECK(prof.max_slope() >= 0.95);
}

TEST_CASE("second-order residual and its grid convergence", "[profile]") {
    for (double alpha : {1.0, 0.05, -0.5}) {
        const auto c = critical(fisher_burgers(alpha), 2e-3);
        const auto coarse = residual_second_order(reconstruct(c.traj, c.problem, {}, 2001), c.model);
        const auto fine = residual_second_order(reconstruct(c.traj, c.problem, {}, 4001), c.model);
        CHECK(coarse.max_abs <= 1e-3);
        CHECK(fine.max_abs <= coarse.max_abs);
        const double ratio = coarse.core_max_abs / fine.core_max_abs;
        INFO("alpha = " << alpha << ", ratio = " << ratio);
        CHECK(ratio > 3.0);
        CHECK(ratio < 5.0);
    }
}

TEST_CASE("a constant profile is not a solution", "[profile]") {
    const Model m = fisher_burgers(0.0);
    FrontProfile p;
    p.epsilon = 1e-2;
    p.speed = 0.5;
    for (int i = 0; i < 501; ++i) {
        p.z.push_back(-1.0 + i / 250.0);
        p.v.push_back(0.5);
        p.dv.push_back(0.0);
        p.w.push_back(0.0);
    }
    CHECK_THAT(residual_second_order(p, m).max_abs, WithinAbs(m.f(0.5), 1e-15));
}

TEST_CASE("residual rejects slopes at the light cone", "[profile]") {
    const auto c = critical(fisher_burgers(0.05), 2e-3);
    auto prof = reconstruct(c.traj, c.problem);
    prof.dv[prof.dv.size() / 2] = 1.0;
    CHECK_THROWS_MATCHES(residual_second_order(prof, c.model), Error, kind_is(ErrorKind::ConstraintViolation));
    auto small = reconstruct(c.traj, c.problem, {}, 101);
    CHECK_THROWS_MATCHES(residual_second_order(small, c.model), Error, kind_is(ErrorKind::InvalidInput));
}

TEST_CASE("reconstruction input checks", "[profile]") {
    const Model m = fisher_burgers(-0.5);
    const FrontProblem below(m, 2e-3, 0.6);
    const auto bad = integrate_backward(below);
    CHECK_THROWS_MATCHES(reconstruct(bad, below), Error, kind_is(ErrorKind::InvalidInput));

    const auto c = critical(m, 2e-3);
    CHECK_THROWS_MATCHES(reconstruct(c.traj, c.problem, {0.6, 0.9}), Error, kind_is(ErrorKind::InvalidInput));
    CHECK_THROWS_MATCHES(reconstruct(c.traj, FrontProblem(m, 1e-3, c.problem.speed)), Error,
                         kind_is(ErrorKind::InvalidInput));

    // A trajectory that touches zero inside the window.
    YTrajectory t = c.traj;
    for (std::size_t i = 0; i < t.v.size(); ++i) {
        if (std::abs(t.v[i] - 0.3) < 0.02) {
            t.q[i] = 0.0;
            t.dq[i] = 0.0;
            t.y[i] = 0.0;
        }
    }
    CHECK_THROWS_MATCHES(reconstruct(t, c.problem), Error, kind_is(ErrorKind::CorruptedTrajectory));
}

TEST_CASE("z(v) grows logarithmically towards v = 1", "[profile]") {
    const auto c = critical(fisher_burgers(0.05), 2e-3);
    // Equal steps in -log(1 - v) give nearly equal steps in z.
    std::vector<double> steps;
    for (double d : {1e-2, 1e-3, 1e-4}) {
        steps.push_back(z_of_v(c.traj, 1.0 - d / 10) - z_of_v(c.traj, 1.0 - d));
    }
    CHECK(steps[0] > 0.0);
    CHECK_THAT(steps[2] / steps[1], WithinAbs(1.0, 0.05));
}
