#pragma once

#include "bifront/error.hpp"
#include "bifront/model.hpp"
#include "bifront/numerics/ode.hpp"
#include "bifront/reduction.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace bifront::oracle {

// ---------------------------------------------------------------------------
// Phase-plane shooting
// ---------------------------------------------------------------------------

struct ShootingOptions {
    double seed_distance = 1e-4; // start at v = 1 - seed_distance
    double v_stop = 1e-3;
    double rel_tol = 1e-11;
    double abs_tol = 1e-14;
    double max_step = 1e-2;
    double max_z_span = 1e4;
};

/// Trajectory of v' = w / sqrt(1 + w^2), eps w' = (c + h'(v)) w / sqrt(1 + w^2) - f(v),
/// stored with increasing z and shifted so that v = 1/2 at z = 0.
struct PhasePlaneTrajectory {
    std::vector<double> z;
    std::vector<double> v;
    std::vector<double> w;
    bool success = false;
    std::string failure;
    double w_half = 0.0; // w where v = 1/2
    double v_end = 0.0;  // last v reached (towards 0)
    double y_end = 0.0;  // eps (sqrt(1 + w^2) - 1) there

    double slope(std::size_t i) const { return w[i] / std::sqrt(1.0 + w[i] * w[i]); }

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
        return (2 * t3 - 3 * t2 + 1) * v[i - 1] + (t3 - 2 * t2 + t) * hstep * slope(i - 1) +
               (-2 * t3 + 3 * t2) * v[i] + (t3 - t2) * hstep * slope(i);
    }
};

/// Shoots the second-order system backward in z from the stable manifold of
/// the saddle (1, 0), seeded by its linearisation. Success means v comes down
/// to v_stop with w > 0 throughout and y(v_stop) within the admissibility
/// threshold, i.e. the trajectory connects to (0, 0).
inline PhasePlaneTrajectory shoot_phase_plane(const FrontProblem& p, const ShootingOptions& opt = {}) {
    const Model& model = p.model;
    const double eps = p.epsilon;
    const double c = p.speed;
    const double b = c + model.h_prime(1.0);
    const double m = model.reaction_slope_at_one();
    const double disc = b * b + 4.0 * eps * m;
    const double lambda_s = (b - std::sqrt(disc)) / (2.0 * eps);
    if (!(lambda_s < 0.0)) {
        throw Error(ErrorKind::DegenerateEndpoint, "no stable direction at (1, 0) for this speed");
    }
    const double delta = opt.seed_distance;

    // t = -z so that the stepper advances forward.
    auto system = [&](const std::array<double, 2>& x, std::array<double, 2>& dxdt, double) {
        const double v = std::clamp(x[0], 0.0, 1.0);
        const double w = x[1];
        const double s = w / std::sqrt(1.0 + w * w);
        dxdt[0] = -s;
        dxdt[1] = -((c + model.h_prime(v)) * s - model.f(v)) / eps;
    };

    PhasePlaneTrajectory tr;
    std::vector<double> ts;
    auto push = [&](double t, const std::array<double, 2>& x) {
        ts.push_back(t);
        tr.v.push_back(x[0]);
        tr.w.push_back(x[1]);
    };

    numerics::DenseRk45<2> rk(opt.abs_tol, opt.rel_tol, opt.max_step);
    const std::array<double, 2> x0{1.0 - delta, -lambda_s * delta};
    rk.initialize(x0, 0.0, 1e-6);
    push(0.0, x0);

    double t_half = std::numeric_limits<double>::quiet_NaN();
    auto locate = [&](double t_lo, double t_hi, auto&& pred) {
        // pred(t_lo) false, pred(t_hi) true
        for (int k = 0; k < 200 && t_hi - t_lo > 1e-13 * std::max(1.0, std::abs(t_hi)); ++k) {
            const double mid = 0.5 * (t_lo + t_hi);
            (pred(rk.state_at(mid)) ? t_hi : t_lo) = mid;
        }
        return t_hi;
    };

    while (true) {
        const auto [t_old, t_new] = rk.step(system);
        const auto x = rk.current_state();
        if (std::isnan(t_half) && x[0] <= 0.5) {
            t_half = locate(t_old, t_new, [](const auto& s) { return s[0] <= 0.5; });
            tr.w_half = rk.state_at(t_half)[1];
        }
        if (x[1] <= 0.0 && x[0] > opt.v_stop) {
            const double tc = locate(t_old, t_new, [](const auto& s) { return s[1] <= 0.0; });
            const auto xc = rk.state_at(tc);
            push(tc, xc);
            std::ostringstream os;
            os << "slope vanishes at v = " << xc[0] << " before reaching the rest state 0";
            tr.failure = os.str();
            tr.v_end = xc[0];
            break;
        }
        if (x[0] > 1.0) {
            tr.failure = "trajectory leaves [0, 1] through v = 1";
            tr.v_end = x[0];
            push(t_new, x);
            break;
        }
        if (x[0] <= opt.v_stop) {
            const double ts_stop = locate(t_old, t_new, [&](const auto& s) { return s[0] <= opt.v_stop; });
            const auto xs = rk.state_at(ts_stop);
            push(ts_stop, xs);
            tr.v_end = xs[0];
            tr.y_end = eps * (std::sqrt(1.0 + xs[1] * xs[1]) - 1.0);
            const double thr = admissibility_threshold(eps, c, opt.v_stop);
            if (tr.y_end <= thr) {
                tr.success = true;
            } else {
                std::ostringstream os;
                os << "arrives at v = " << xs[0] << " with y = " << tr.y_end << " above the threshold " << thr
                   << ": the trajectory leaves [0, 1] through v = 0";
                tr.failure = os.str();
            }
            break;
        }
        if (t_new > opt.max_z_span) {
            tr.failure = "z span exhausted before reaching the rest state 0";
            tr.v_end = x[0];
            push(t_new, x);
            break;
        }
        push(t_new, x);
    }

    const double shift = std::isnan(t_half) ? 0.0 : t_half;
    const std::size_t n = ts.size();
    tr.z.resize(n);
    std::reverse(tr.v.begin(), tr.v.end());
    std::reverse(tr.w.begin(), tr.w.end());
    for (std::size_t i = 0; i < n; ++i) {
        tr.z[i] = -(ts[n - 1 - i] - shift);
    }
    return tr;
}

/// sup |a(z) - b(z)| over the nodes of `a` that fall inside both z ranges.
template <class A, class B>
double sup_distance(const A& a, const B& b) {
    const double lo = std::max(a.z.front(), b.z.front());
    const double hi = std::min(a.z.back(), b.z.back());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.z.size(); ++i) {
        if (a.z[i] < lo || a.z[i] > hi) {
            continue;
        }
        worst = std::max(worst, std::abs(a.v[i] - b.v_at(a.z[i])));
    }
    for (std::size_t i = 0; i < b.z.size(); ++i) {
        if (b.z[i] < lo || b.z[i] > hi) {
            continue;
        }
        worst = std::max(worst, std::abs(b.v[i] - a.v_at(b.z[i])));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Closed forms and brute-force scans
// ---------------------------------------------------------------------------

/// y(v) = sqrt(eps^2 + (c v + h(v))^2) - eps, the exact solution when f = 0.
inline double pure_convection_exact(double eps, double c, const std::function<double(double)>& h, double v) {
    if (!(eps > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "epsilon must be positive");
    }
    if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorKind::Domain, "v outside [0, 1]");
    }
    for (int j = 1; j < 1000; ++j) {
        const double s = j / 1000.0;
        if (!(c * s + h(s) > 0.0)) {
            std::ostringstream os;
            os << "c v + h(v) <= 0 at v = " << s;
            throw Error(ErrorKind::Domain, os.str());
        }
    }
    const double g = c * v + h(v);
    return g * g / (std::sqrt(eps * eps + g * g) + eps);
}

/// Every sign change of g on a uniform grid of grid_n cells over [0, 1],
/// refined by plain bisection to 1e-12.
inline std::vector<double> brute_scan_roots(const std::function<double(double)>& g, std::size_t grid_n,
                                            double a = 0.0, double b = 1.0) {
    if (grid_n < 1000) {
        throw Error(ErrorKind::InvalidInput, "root scan needs at least 1000 cells");
    }
    std::vector<double> roots;
    double x0 = a;
    double g0 = g(a);
    if (g0 == 0.0) {
        roots.push_back(a);
    }
    for (std::size_t i = 1; i <= grid_n; ++i) {
        const double x1 = a + (b - a) * static_cast<double>(i) / static_cast<double>(grid_n);
        const double g1 = g(x1);
        if (g1 == 0.0) {
            roots.push_back(x1);
        } else if (g0 != 0.0 && (g0 < 0.0) != (g1 < 0.0)) {
            double lo = x0;
            double hi = x1;
            const bool neg_lo = g0 < 0.0;
            while (hi - lo > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                ((g(mid) < 0.0) == neg_lo ? lo : hi) = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        g0 = g1;
    }
    return roots;
}

/// Grid maximum followed by golden-section refinement on the two
/// neighbouring cells. Returns {argmax, max}.
inline std::pair<double, double> brute_maximize(const std::function<double(double)>& g, double a, double b,
                                                std::size_t grid_n = 100000) {
    std::size_t best = 0;
    double best_val = g(a);
    for (std::size_t i = 1; i <= grid_n; ++i) {
        const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(grid_n);
        const double gx = g(x);
        if (gx > best_val) {
            best_val = gx;
            best = i;
        }
    }
    const double hcell = (b - a) / static_cast<double>(grid_n);
    double lo = std::max(a, a + hcell * (static_cast<double>(best) - 1.0));
    double hi = std::min(b, a + hcell * (static_cast<double>(best) + 1.0));
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - r * (hi - lo);
    double x2 = lo + r * (hi - lo);
    double g1 = g(x1);
    double g2 = g(x2);
    while (hi - lo > 1e-12) {
        if (g1 < g2) {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + r * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - r * (hi - lo);
            g1 = g(x1);
        }
    }
    const double x = 0.5 * (lo + hi);
    const double gx = g(x);
    if (gx >= best_val) {
        return {x, gx};
    }
    return {a + hcell * static_cast<double>(best), best_val};
}

/// Integral by tanh-sinh, independent of the Gauss-Kronrod code in the model.
inline double quadrature(const std::function<double(double)>& g, double a, double b) {
    if (a == b) {
        return 0.0;
    }
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(g, a, b, 1e-13);
}

/// Fixed-step RK4 for (c + h'(v)) v' = f(v) from (z0, v0) to z1.
inline double inviscid_rk4(const Model& model, double c, double z0, double v0, double z1, int steps = 20000) {
    double v = v0;
    const double hstep = (z1 - z0) / steps;
    auto rhs = [&](double vv) {
        vv = std::clamp(vv, 0.0, 1.0);
        return model.f(vv) / (c + model.h_prime(vv));
    };
    for (int i = 0; i < steps; ++i) {
        const double k1 = rhs(v);
        const double k2 = rhs(v + 0.5 * hstep * k1);
        const double k3 = rhs(v + 0.5 * hstep * k2);
        const double k4 = rhs(v + hstep * k3);
        v += hstep * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Certification records
// ---------------------------------------------------------------------------

struct Certification {
    std::string quantity_id;
    double value;
    std::string method;
    double tolerance;
};

/// Values that unit tests compare against, each produced by an independent
/// brute-force route rather than typed in.
inline std::vector<Certification> certify() {
    std::vector<Certification> out;
    auto fb = [](double alpha) { return Model(Logistic{1.0}, QuadraticConvection{alpha}); };
    auto F_of = [](const Model& m, double v) { return quadrature([&m](double s) { return m.f(s); }, 0.0, v); };

    {
        const Model m = fb(-0.5);
        out.push_back({"F(1):fisher-burgers", F_of(m, 1.0), "tanh-sinh quadrature", 1e-12});
    }
    {
        const Model m(PowerLogistic{2.0, 1.0}, QuadraticConvection{1.0});
        out.push_back({"F(1):power-logistic-p2", F_of(m, 1.0), "tanh-sinh quadrature", 1e-12});
    }
    // v_plus as a root of F - h - v (f - h'), the defining equation.
    for (double alpha : {0.05, 0.0, -0.05, 0.2}) {
        const Model m = fb(alpha);
        auto g = [&](double v) { return F_of(m, v) - m.h(v) - v * (m.f(v) - m.h_prime(v)); };
        const auto roots = brute_scan_roots(g, 2000, 1e-3, 1.0 - 1e-3);
        std::ostringstream id;
        id << "v_plus:alpha=" << alpha;
        out.push_back({id.str(), roots.empty() ? std::nan("") : roots.back(), "root scan of F-h=v(f-h')", 1e-9});
    }
    // sup S by grid maximisation.
    const std::pair<double, const char*> alphas[] = {{-0.5, "-0.5"}, {0.05, "0.05"}, {-0.05, "-0.05"}, {-1.0 / 6.0, "-1/6"}};
    for (const auto& [alpha, label] : alphas) {
        const Model m = fb(alpha);
        auto S = [&](double v) { return (F_of(m, v) - m.h(v)) / v; };
        const auto [arg, val] = brute_maximize(S, 1e-6, 1.0, 20000);
        out.push_back({std::string("sup_S:alpha=") + label, val, "grid maximisation of S", 1e-9});
    }
    {
        const Model m(Logistic{1.0}, ZeroConvection{});
        auto S = [&](double v) { return F_of(m, v) / v; };
        out.push_back({"sup_S:h=0", brute_maximize(S, 1e-6, 1.0, 20000).second, "grid maximisation of S", 1e-9});
    }
    {
        const Model m = fb(-0.5);
        double max_f = 0.0;
        double min_hp = 0.0;
        double sup_ratio = 0.0;
        for (int j = 1; j <= 200000; ++j) {
            const double s = j / 200000.0;
            max_f = std::max(max_f, m.f(s));
            min_hp = std::min(min_hp, m.h_prime(s));
            sup_ratio = std::max(sup_ratio, m.f(s) / s);
        }
        out.push_back({"upper_bound:alpha=-0.5,eps=2e-3", max_f - min_hp + 2.0 * std::sqrt(2e-3 * sup_ratio),
                       "fine grid", 1e-6});
    }
    {
        // Series coefficient: positive root of 2B^2 + gamma B - m by scan.
        const double gamma = std::sqrt(2.0);
        auto g = [gamma](double B) { return 2.0 * B * B + gamma * B - 1.0; };
        const auto roots = brute_scan_roots(g, 10000, 0.0, 5.0);
        out.push_back({"series_B:alpha=0,c=1,eps=1", roots.front(), "root scan of the quadratic", 1e-10});
    }
    {
        const Model m = fb(-0.5);
        const double g = 0.7 * 0.5 + m.h(0.5) - F_of(m, 0.5);
        out.push_back({"y_upper_bound:alpha=-0.5,c=0.7,eps=2e-3,v=0.5", std::sqrt(4e-6 + g * g) - 2e-3,
                       "closed form with tanh-sinh F", 1e-9});
    }
    {
        auto h = [](double v) { return v * v * (1.0 - v); };
        out.push_back({"pure_convection:eps=0.01,v=0.5", pure_convection_exact(0.01, 0.0, h, 0.5), "closed form",
                       1e-12});
    }
    {
        const double y = 2.0;
        const double eps = 1.0;
        const double val = std::sqrt(y * (2 * eps + y)) / (eps + y) - 0.25;
        out.push_back({"rhs_y:eps=1,c=1,v=0.5,y=2", val, "direct arithmetic", 1e-14});
    }
    {
        const Model m(PowerLogistic{2.0, 1.0}, QuadraticConvection{1.0});
        out.push_back({"inviscid:power-logistic-p2,z=2", inviscid_rk4(m, 0.0, 0.0, 0.5, 2.0), "RK4 on the inviscid ODE",
                       1e-9});
    }
    return out;
}

} // namespace bifront::oracle
