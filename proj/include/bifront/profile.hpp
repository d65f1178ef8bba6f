#pragma once

#include "bifront/error.hpp"
#include "bifront/model.hpp"
#include "bifront/numerics/quadrature.hpp"
#include "bifront/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

namespace bifront {

/// Front profile v(z) sampled on an increasing z grid, normalized so that
/// v(0) = 1/2.
struct FrontProfile {
    std::vector<double> z;
    std::vector<double> v;
    std::vector<double> dv;
    std::vector<double> w; // v' / sqrt(1 - v'^2), kept to avoid cancellation when v' ~ 1
    double epsilon = 0.0;
    double speed = 0.0;

    /// Cubic Hermite interpolation on (v, dv). Outside the sampled range the
    /// end values are returned.
    double v_at(double zz) const {
        if (zz <= z.front()) {
            return v.front();
        }
        if (zz >= z.back()) {
            return v.back();
        }
        const auto it = std::upper_bound(z.begin(), z.end(), zz);
        const auto i = static_cast<std::size_t>(it - z.begin());
        const double x0 = z[i - 1];
        const double hstep = z[i] - x0;
        const double t = (zz - x0) / hstep;
        const double t2 = t * t;
        const double t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * v[i - 1] + (t3 - 2 * t2 + t) * hstep * dv[i - 1] +
               (-2 * t3 + 3 * t2) * v[i] + (t3 - t2) * hstep * dv[i];
    }

    double max_slope() const { return *std::max_element(dv.begin(), dv.end()); }
};

struct ProfileWindow {
    double v_lo = 1e-4;
    double v_hi = 1.0 - 1e-4;
};

namespace detail {

/// dz/dv = (eps + y) / sqrt(y (2 eps + y)) = sqrt(eps^2 + q^2) / q.
inline double dz_dv(const YTrajectory& traj, double v) {
    const double q = traj.q_at(v);
    if (!(q > 0.0)) {
        std::ostringstream os;
        os << "trajectory has y <= 0 at v = " << v;
        throw Error(ErrorKind::CorruptedTrajectory, os.str());
    }
    const double eps = traj.epsilon;
    return std::sqrt(eps * eps + q * q) / q;
}

/// Integral of dz/dv over [a, b]. Panels touching the outer fifths use the
/// endpoint substitutions, where 1/q behaves like C/s or C/(1-s).
inline double z_increment(const YTrajectory& traj, double a, double b) {
    auto g = [&traj](double s) { return dz_dv(traj, s); };
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    double r = 0.0;
    if (hi <= 0.2) {
        r = numerics::integrate_toward_zero(g, lo, hi, 1e-11);
    } else if (lo >= 0.8) {
        r = numerics::integrate_toward_one(g, lo, hi, 1e-11);
    } else {
        r = numerics::integrate(g, lo, hi, 1e-11);
    }
    return a <= b ? r : -r;
}

} // namespace detail

/// z(v) with z(1/2) = 0, for a single point.
inline double z_of_v(const YTrajectory& traj, double v) {
    return detail::z_increment(traj, 0.5, v);
}

/// Builds the profile from an admissible trajectory on `n` points uniform in
/// v (the point v = 1/2 is always a node).
inline FrontProfile reconstruct(const YTrajectory& traj, const FrontProblem& problem,
                                ProfileWindow window = {}, std::size_t n = 2001) {
    if (traj.verdict != Verdict::Admissible) {
        throw Error(ErrorKind::InvalidInput,
                    std::string("profile needs an admissible trajectory, got ") + std::string(to_string(traj.verdict)));
    }
    if (traj.v.empty() || window.v_lo < traj.v.back() || window.v_hi > traj.v.front() ||
        !(window.v_lo < 0.5 && 0.5 < window.v_hi)) {
        throw Error(ErrorKind::InvalidInput, "profile window must contain 1/2 and lie inside the trajectory");
    }
    if (n < 5) {
        throw Error(ErrorKind::InvalidInput, "profile needs at least 5 points");
    }
    if (problem.epsilon != traj.epsilon || problem.speed != traj.speed) {
        throw Error(ErrorKind::InvalidInput, "trajectory was computed for a different problem");
    }

    const double span = window.v_hi - window.v_lo;
    auto n_left = static_cast<std::size_t>(std::lround((0.5 - window.v_lo) / span * static_cast<double>(n - 1)));
    n_left = std::clamp<std::size_t>(n_left, 1, n - 2);
    const std::size_t n_right = n - 1 - n_left;

    std::vector<double> vs(n);
    for (std::size_t i = 0; i <= n_left; ++i) {
        vs[i] = window.v_lo + (0.5 - window.v_lo) * static_cast<double>(i) / static_cast<double>(n_left);
    }
    for (std::size_t i = 1; i <= n_right; ++i) {
        vs[n_left + i] = 0.5 + (window.v_hi - 0.5) * static_cast<double>(i) / static_cast<double>(n_right);
    }
    vs[n_left] = 0.5;

    FrontProfile prof;
    prof.epsilon = traj.epsilon;
    prof.speed = traj.speed;
    prof.v = vs;
    prof.z.assign(n, 0.0);
    prof.dv.resize(n);
    prof.w.resize(n);

    for (std::size_t i = n_left + 1; i < n; ++i) {
        prof.z[i] = prof.z[i - 1] + detail::z_increment(traj, vs[i - 1], vs[i]);
    }
    for (std::size_t i = n_left; i-- > 0;) {
        prof.z[i] = prof.z[i + 1] - detail::z_increment(traj, vs[i], vs[i + 1]);
    }
    const double eps = traj.epsilon;
    for (std::size_t i = 0; i < n; ++i) {
        const double q = traj.q_at(vs[i]);
        if (!(q > 0.0)) {
            std::ostringstream os;
            os << "trajectory has y <= 0 at v = " << vs[i];
            throw Error(ErrorKind::CorruptedTrajectory, os.str());
        }
        prof.dv[i] = q / std::sqrt(eps * eps + q * q);
        prof.w[i] = q / eps;
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(prof.z[i] > prof.z[i - 1])) {
            throw Error(ErrorKind::CorruptedTrajectory, "reconstructed z is not increasing");
        }
    }
    return prof;
}

struct ResidualReport {
    double max_abs = 0.0; // middle 80% of the z range
    double at_z = 0.0;
    std::size_t points = 0;
    double core_max_abs = 0.0; // middle 80% of the v window
    double core_at_v = 0.0;
};

/// Residual of eps (v'/sqrt(1-v'^2))' - (c + h'(v)) v' + f(v) by centered
/// differences, maximised over the middle 80% of the z range. The same
/// maximum over the middle 80% of the v window is reported as `core`; it
/// leaves out the exponential tails, which a grid uniform in v resolves
/// coarsely in z.
inline ResidualReport residual_second_order(const FrontProfile& prof, const Model& model) {
    const std::size_t n = prof.z.size();
    if (n < 402) {
        throw Error(ErrorKind::InvalidInput, "residual check needs at least 400 interior points");
    }
    std::vector<double> flux(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = prof.dv[i];
        if (!(s < 1.0)) {
            std::ostringstream os;
            os << "gradient constraint violated: v' = " << s << " at z = " << prof.z[i];
            throw Error(ErrorKind::ConstraintViolation, os.str());
        }
        flux[i] = prof.w.size() == n ? prof.epsilon * prof.w[i] : prof.epsilon * s / std::sqrt((1.0 - s) * (1.0 + s));
    }
    const double z0 = prof.z.front();
    const double len = prof.z.back() - z0;
    const double lo = z0 + 0.1 * len;
    const double hi = z0 + 0.9 * len;
    const double v0 = prof.v.front();
    const double vspan = prof.v.back() - v0;
    const double core_lo = v0 + 0.1 * vspan;
    const double core_hi = v0 + 0.9 * vspan;

    ResidualReport r;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double v = prof.v[i];
        const bool in_z = prof.z[i] >= lo && prof.z[i] <= hi;
        const bool in_core = v >= core_lo && v <= core_hi;
        if (!in_z && !in_core) {
            continue;
        }
        // Three-point derivative on a non-uniform grid.
        const double h0 = prof.z[i] - prof.z[i - 1];
        const double h1 = prof.z[i + 1] - prof.z[i];
        const double dflux = (-h1 / (h0 * (h0 + h1))) * flux[i - 1] + ((h1 - h0) / (h0 * h1)) * flux[i] +
                             (h0 / (h1 * (h0 + h1))) * flux[i + 1];
        const double res = std::abs(dflux - (prof.speed + model.h_prime(v)) * prof.dv[i] + model.f(v));
        if (in_z) {
            ++r.points;
            if (res > r.max_abs) {
                r.max_abs = res;
                r.at_z = prof.z[i];
            }
        }
        if (in_core && res > r.core_max_abs) {
            r.core_max_abs = res;
            r.core_at_v = v;
        }
    }
    return r;
}

/// Largest |y - eps (1/sqrt(1 - v'^2) - 1)| over the profile nodes.
inline double roundtrip_y_error(const FrontProfile& prof, const YTrajectory& traj) {
    double worst = 0.0;
    for (std::size_t i = 0; i < prof.v.size(); ++i) {
        const double s = prof.dv[i];
        const double y_back = prof.epsilon * (1.0 / std::sqrt((1.0 - s) * (1.0 + s)) - 1.0);
        worst = std::max(worst, std::abs(y_back - traj.y_at(prof.v[i])));
    }
    return worst;
}

} // namespace bifront
