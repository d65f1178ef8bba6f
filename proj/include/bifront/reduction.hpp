#pragma once

#include "bifront/error.hpp"
#include "bifront/model.hpp"
#include "bifront/numerics/ode.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

namespace bifront {

/// A model with a fixed diffusion strength and candidate speed.
struct FrontProblem {
    Model model;
    double epsilon;
    double speed;

    FrontProblem(Model m, double eps, double c) : model(std::move(m)), epsilon(eps), speed(c) {
        if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
            throw Error(ErrorKind::InvalidInput, "epsilon must be positive");
        }
        if (!std::isfinite(speed)) {
            throw Error(ErrorKind::InvalidInput, "speed must be finite");
        }
    }
};

enum class Verdict { Admissible, InteriorCrossing, TerminalPositive };

constexpr std::string_view to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::Admissible: return "admissible";
    case Verdict::InteriorCrossing: return "interior-crossing";
    case Verdict::TerminalPositive: return "terminal-positive";
    }
    return "unknown";
}

struct IntegrationOptions {
    double delta = 1e-6;   // series start at v = 1 - delta
    double v_min = 1e-4;   // integration stops here
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = 2e-3; // keeps stored samples dense enough for interpolation
};

/// Sampled backward solution y(v) of the first-order reduction.
///
/// Internally the integration runs on q = sqrt(y (2 eps + y)), which is
/// linear (not quadratic) at both degenerate endpoints and crosses zero
/// transversally. `q` and `dq` are kept for Hermite interpolation.
struct YTrajectory {
    std::vector<double> v; // strictly decreasing
    std::vector<double> y;
    std::vector<double> q;
    std::vector<double> dq;
    double epsilon = 0.0;
    double speed = 0.0;
    Verdict verdict = Verdict::Admissible;
    double v_cross = std::numeric_limits<double>::quiet_NaN();
    double y_end = std::numeric_limits<double>::quiet_NaN();
    double v_min_reached = std::numeric_limits<double>::quiet_NaN();
    double threshold = 0.0;
    bool shallow_start = false;

    /// Cubic Hermite interpolation of q, mapped back to y.
    double y_at(double vv) const {
        const double qq = q_at(vv);
        return qq * qq / (std::sqrt(epsilon * epsilon + qq * qq) + epsilon);
    }

    double q_at(double vv) const {
        if (v.empty() || vv > v.front() || vv < v.back()) {
            std::ostringstream os;
            os << "v = " << vv << " outside trajectory range";
            throw Error(ErrorKind::Domain, os.str());
        }
        // v is decreasing: find first index with v[i] < vv.
        auto it = std::upper_bound(v.begin(), v.end(), vv, std::greater<>());
        if (it == v.end()) {
            return q.back();
        }
        const auto i = static_cast<std::size_t>(it - v.begin());
        if (i == 0) {
            return q.front();
        }
        const double x0 = v[i - 1];
        const double x1 = v[i];
        const double hstep = x1 - x0;
        const double t = (vv - x0) / hstep;
        const double t2 = t * t;
        const double t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * q[i - 1] + (t3 - 2 * t2 + t) * hstep * dq[i - 1] +
               (-2 * t3 + 3 * t2) * q[i] + (t3 - t2) * hstep * dq[i];
    }
};

/// y' = (c + h'(v)) sqrt(y (2 eps + y)) / (eps + y) - f(v).
inline double rhs_y(const FrontProblem& p, double v, double y) {
    if (y < 0.0) {
        throw Error(ErrorKind::Domain, "rhs_y requires y >= 0");
    }
    const double eps = p.epsilon;
    return (p.speed + p.model.h_prime(v)) * std::sqrt(y * (2.0 * eps + y)) / (eps + y) - p.model.f(v);
}

namespace detail {

/// dq/dv for q = sqrt(y (2 eps + y)): (c + h') - f (eps + y) / q.
inline double rhs_q(const FrontProblem& p, double v, double q) {
    const double c_eff = p.speed + p.model.h_prime(v);
    const double fv = p.model.f(v);
    if (fv == 0.0) {
        return c_eff;
    }
    const double qq = std::max(q, 1e-300);
    const double eps = p.epsilon;
    return c_eff - fv * std::sqrt(eps * eps + qq * qq) / qq;
}

inline double y_from_q(double q, double eps) { return q * q / (std::sqrt(eps * eps + q * q) + eps); }

inline double q_from_y(double y, double eps) { return std::sqrt(y * (2.0 * eps + y)); }

} // namespace detail

struct SeriesStart {
    double v_start;
    double y_start;
    double B;     // y ~ B^2 delta^2
    bool shallow; // B == 0: seed from the next-order balance
};

/// Local expansion y(1 - delta) = A delta^2 with A = B^2 and B the positive
/// root of 2 B^2 + gamma B - m = 0, gamma = (c + h'(1)) sqrt(2 / eps).
inline SeriesStart series_start_at_one(const FrontProblem& p, double delta) {
    if (!(delta > 0.0 && delta <= 1e-3)) {
        throw Error(ErrorKind::InvalidInput, "series start needs 0 < delta <= 1e-3");
    }
    const double eps = p.epsilon;
    const double c_eff = p.speed + p.model.h_prime(1.0);
    const double gamma = c_eff * std::sqrt(2.0 / eps);
    const double m = p.model.reaction_slope_at_one();
    SeriesStart s{1.0 - delta, 0.0, 0.0, false};
    if (m > 0.0) {
        s.B = (-gamma + std::sqrt(gamma * gamma + 8.0 * m)) / 4.0;
    } else if (gamma < 0.0) {
        s.B = -gamma / 2.0;
    } else if (gamma > 0.0) {
        s.B = 0.0;
    } else {
        throw Error(ErrorKind::DegenerateEndpoint,
                    "f has zero slope at 1 and c + h'(1) = 0: no front attaches at v = 1");
    }
    if (s.B > 0.0) {
        s.y_start = s.B * s.B * delta * delta;
    } else {
        // f vanishes faster than linearly at 1: balance gamma sqrt(y) = f.
        s.shallow = true;
        const double r = p.model.f(s.v_start) / gamma;
        s.y_start = r * r;
        if (!(s.y_start > 0.0)) {
            throw Error(ErrorKind::DegenerateEndpoint, "shallow start produced a zero seed");
        }
    }
    return s;
}

inline double admissibility_threshold(double eps, double c, double v_min) {
    const double cv = std::max(c, 0.01) * v_min;
    return std::max(2.0 * cv * cv / eps, 1e-12);
}

/// Integrates the reduction backward from the series start down to v_min.
inline YTrajectory integrate_backward(const FrontProblem& p, const IntegrationOptions& opt = {}) {
    if (!(opt.v_min > 0.0 && opt.v_min < 1.0 - opt.delta)) {
        throw Error(ErrorKind::InvalidInput, "need 0 < v_min < 1 - delta");
    }
    const double eps = p.epsilon;
    YTrajectory traj;
    traj.epsilon = eps;
    traj.speed = p.speed;
    traj.threshold = admissibility_threshold(eps, p.speed, opt.v_min);

    if (p.model.reaction_free() && p.speed + p.model.h_prime(1.0) >= 0.0) {
        // Without reaction q' = c + h', so q turns negative right at v = 1.
        traj.verdict = Verdict::InteriorCrossing;
        traj.v_cross = 1.0;
        traj.v_min_reached = 1.0;
        traj.y_end = 0.0;
        traj.v = {1.0};
        traj.q = {0.0};
        traj.dq = {p.speed + p.model.h_prime(1.0)};
        traj.y = {0.0};
        return traj;
    }

    const SeriesStart start = series_start_at_one(p, opt.delta);
    traj.shallow_start = start.shallow;

    const double q0 = detail::q_from_y(start.y_start, eps);
    const double abs_tol = std::min(opt.abs_tol, opt.rel_tol * q0);

    // Independent variable t = -v so that the stepper advances forward.
    auto system = [&p](const std::array<double, 1>& x, std::array<double, 1>& dxdt, double t) {
        dxdt[0] = -detail::rhs_q(p, std::clamp(-t, 0.0, 1.0), x[0]);
    };
    auto push = [&](double v, double q) {
        traj.v.push_back(v);
        traj.q.push_back(q);
        traj.dq.push_back(detail::rhs_q(p, v, q));
        traj.y.push_back(detail::y_from_q(q, eps));
    };

    numerics::DenseRk45<1> rk(abs_tol, opt.rel_tol, opt.max_step);
    const double span = start.v_start - opt.v_min;
    rk.initialize({q0}, -start.v_start, std::min(1e-3 * opt.delta, span));
    push(start.v_start, q0);

    while (true) {
        const auto [t_old, t_new] = rk.step(system);
        const double v_old = -t_old;
        const double v_new = -t_new;
        const double q_new = rk.current_state()[0];

        if (q_new <= 0.0 && v_new > opt.v_min) {
            // Locate the zero of q inside (v_new, v_old] on the dense output.
            double lo = v_new;
            double hi = v_old;
            while (hi - lo > 1e-10) {
                const double mid = 0.5 * (lo + hi);
                (rk.state_at(-mid)[0] > 0.0 ? hi : lo) = mid;
            }
            traj.verdict = Verdict::InteriorCrossing;
            traj.v_cross = 0.5 * (lo + hi);
            traj.v_min_reached = traj.v_cross;
            traj.y_end = 0.0;
            if (traj.v_cross < traj.v.back()) {
                push(traj.v_cross, 0.0);
            }
            return traj;
        }

        if (v_new <= opt.v_min) {
            const double q_end = rk.state_at(-opt.v_min)[0];
            if (q_end <= 0.0) {
                // Zero crossing below v_min counts as reaching y = 0.
                push(opt.v_min, 0.0);
                traj.y_end = 0.0;
            } else {
                push(opt.v_min, q_end);
                traj.y_end = traj.y.back();
            }
            traj.v_min_reached = opt.v_min;
            traj.verdict = traj.y_end <= traj.threshold ? Verdict::Admissible : Verdict::TerminalPositive;
            return traj;
        }
        push(v_new, q_new);
    }
}

/// Integrated necessary bound y(v) <= sqrt(eps^2 + (c v + h - F)^2) - eps.
/// Returns nullopt when c v + h(v) - F(v) <= 0, i.e. c is necessarily
/// inadmissible.
inline std::optional<double> y_upper_bound(const FrontProblem& p, double v) {
    if (v == 0.0) {
        return 0.0;
    }
    const double g = p.speed * v + p.model.h(v) - p.model.F(v);
    if (!(g > 0.0)) {
        return std::nullopt;
    }
    const double eps = p.epsilon;
    return g * g / (std::sqrt(eps * eps + g * g) + eps);
}

} // namespace bifront
