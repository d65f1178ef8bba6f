#pragma once

#include "bifront/error.hpp"
#include "bifront/model.hpp"
#include "bifront/numerics/roots.hpp"
#include "bifront/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace bifront {

struct SpeedBounds {
    double lower;     // max(0, sup S), necessary for admissibility
    double upper;     // sufficient for admissibility
    double sup_S_arg; // where sup S is attained
};

namespace detail {

struct SupS {
    double value;
    double arg;
};

inline SupS sup_S(const Model& model) {
    const auto n = model.quadrature_grid_size();
    auto node = [n](std::size_t j) { return static_cast<double>(j) / static_cast<double>(n); };
    std::size_t best = n;
    double best_value = evaluate_S(model, 1.0);
    for (std::size_t j = 1; j < n; ++j) {
        const double s = evaluate_S(model, node(j));
        if (s > best_value) {
            best_value = s;
            best = j;
        }
    }
    SupS r{best_value, node(best)};
    if (best < n) {
        auto S = [&model](double v) { return evaluate_S(model, v); };
        const double lo = best == 1 ? 1e-3 * node(1) : node(best - 1);
        const auto [arg, value] = numerics::maximize(S, lo, node(best + 1), 40);
        if (value > r.value) {
            r = {value, arg};
        }
    }
    return r;
}

} // namespace detail

/// max(0, sup_{v in (0,1]} (F(v) - h(v)) / v): no speed below this admits a front.
inline double lower_bound(const Model& model) { return std::max(0.0, detail::sup_S(model).value); }

/// max f - min h' + 2 sqrt(eps sup f(v)/v): every speed above this is admissible.
inline double upper_bound(const Model& model, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "epsilon must be positive");
    }
    const auto n = model.quadrature_grid_size();
    double max_f = 0.0;
    double min_hp = model.h_prime(0.0);
    double sup_ratio = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        const double s = static_cast<double>(j) / static_cast<double>(n);
        const double fs = model.f(s);
        max_f = std::max(max_f, fs);
        min_hp = std::min(min_hp, model.h_prime(s));
        sup_ratio = std::max(sup_ratio, fs / s);
    }
    // The supremum of f(v)/v may sit at v -> 0+.
    for (int e = 0; e < 80; ++e) {
        const double s = std::pow(10.0, -8.0 + 0.1 * e);
        sup_ratio = std::max(sup_ratio, model.f(s) / s);
    }
    return max_f - min_hp + 2.0 * std::sqrt(epsilon * sup_ratio);
}

inline SpeedBounds speed_bounds(const Model& model, double epsilon) {
    const auto s = detail::sup_S(model);
    return {std::max(0.0, s.value), upper_bound(model, epsilon), s.arg};
}

struct BisectionStep {
    double speed;
    Verdict verdict;
};

struct CriticalSpeedResult {
    double c_star = 0.0;
    double c_lo = 0.0; // classified below critical (or the lower bound)
    double c_hi = 0.0; // classified at or above critical
    double epsilon = 0.0;
    SpeedBounds bounds{};
    int iterations = 0;
    double final_bracket_width = 0.0;
    YTrajectory trajectory_at_c_star; // integrated at c_hi
    std::vector<BisectionStep> log;
};

struct SpeedOptions {
    double tol_c = 1e-6;
    int max_iterations = 60;
    IntegrationOptions integration{};
};

/// True when the backward solution reaches y = 0 at or before v_min
/// (Admissible, or a zero crossing, which only occurs above the admissible
/// speed when f vanishes identically).
inline bool reaches_zero(Verdict v) noexcept { return v != Verdict::TerminalPositive; }

/// Smallest admissible speed by bisection on the backward-integration verdict.
inline CriticalSpeedResult critical_speed(const Model& model, double epsilon, const SpeedOptions& opt = {}) {
    CriticalSpeedResult r;
    r.epsilon = epsilon;
    r.bounds = speed_bounds(model, epsilon);

    auto classify = [&](double c) {
        YTrajectory t = integrate_backward(FrontProblem(model, epsilon, c), opt.integration);
        r.log.push_back({c, t.verdict});
        return t;
    };

    // Anything above the sufficient bound is admissible; the small offset
    // keeps the bracket end away from a degenerate c + h'(1) = 0.
    double hi = r.bounds.upper + opt.tol_c;
    YTrajectory hi_traj = classify(hi);
    if (!reaches_zero(hi_traj.verdict)) {
        std::ostringstream os;
        os << "speed " << hi << " above the sufficient bound classified " << to_string(hi_traj.verdict);
        throw Error(ErrorKind::InternalInconsistency, os.str());
    }

    double lo = r.bounds.lower;
    std::optional<YTrajectory> lo_traj;
    try {
        lo_traj = classify(lo);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateEndpoint) throw;
    }
    if (lo_traj && reaches_zero(lo_traj->verdict)) {
        r.c_star = r.c_lo = r.c_hi = lo;
        r.final_bracket_width = 0.0;
        r.trajectory_at_c_star = std::move(*lo_traj);
        return r;
    }

    while (hi - lo > opt.tol_c && r.iterations < opt.max_iterations) {
        const double mid = 0.5 * (lo + hi);
        ++r.iterations;
        std::optional<YTrajectory> t;
        try {
            t = classify(mid);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateEndpoint) throw;
        }
        if (t && reaches_zero(t->verdict)) {
            hi = mid;
            hi_traj = std::move(*t);
        } else {
            lo = mid;
        }
    }
    r.c_lo = lo;
    r.c_hi = hi;
    r.c_star = 0.5 * (lo + hi);
    r.final_bracket_width = hi - lo;
    r.trajectory_at_c_star = std::move(hi_traj);
    return r;
}

struct MonotonicityReport {
    struct Row {
        double epsilon;
        double c_star;
    };
    std::vector<Row> rows;
    bool monotone = true;
    std::vector<std::size_t> violations; // index i where c*(eps_i) < c*(eps_{i+1}) - tol
};

/// Critical speeds over a decreasing list of eps; flags any increase beyond tol_c.
inline MonotonicityReport speed_monotonicity_check(const Model& model, const std::vector<double>& eps_list,
                                                   const SpeedOptions& opt = {}) {
    for (std::size_t i = 1; i < eps_list.size(); ++i) {
        if (!(eps_list[i] < eps_list[i - 1])) {
            throw Error(ErrorKind::InvalidInput, "eps list must be strictly decreasing");
        }
    }
    MonotonicityReport rep;
    for (double eps : eps_list) {
        rep.rows.push_back({eps, critical_speed(model, eps, opt).c_star});
    }
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
        if (rep.rows[i].c_star < rep.rows[i + 1].c_star - opt.tol_c) {
            rep.monotone = false;
            rep.violations.push_back(i);
        }
    }
    return rep;
}

} // namespace bifront
