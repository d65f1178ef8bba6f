#pragma once

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <algorithm>
#include <limits>
#include <vector>

namespace bifront::numerics {

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
double gk15(F& f, double a, double b, double& err) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * pair;
        if (j % 2 == 1) {
            gauss += kWg[j / 2] * pair;
        }
    }
    err = std::abs((kronrod - gauss) * half);
    return kronrod * half;
}

} // namespace detail

/// Adaptive Gauss-Kronrod 7/15 on [a, b] with interval bisection. Stops when
/// the summed error estimate is below rel_tol * |I| (or abs_tol). Returns the
/// signed integral.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 1e-300,
                 int max_intervals = 4000) {
    if (a == b) {
        return 0.0;
    }
    struct Panel {
        double a, b, value, err;
    };
    std::vector<Panel> panels;
    double err = 0.0;
    const double v0 = detail::gk15(f, a, b, err);
    panels.push_back({a, b, v0, err});
    double total = v0;
    double total_err = err;
    while (static_cast<int>(panels.size()) < max_intervals) {
        const double eps_floor = 50.0 * std::numeric_limits<double>::epsilon() * std::abs(total);
        if (total_err <= std::max({rel_tol * std::abs(total), abs_tol, eps_floor})) {
            break;
        }
        auto worst = std::max_element(panels.begin(), panels.end(),
                                      [](const Panel& x, const Panel& y) { return x.err < y.err; });
        const Panel p = *worst;
        const double mid = 0.5 * (p.a + p.b);
        if (mid <= std::min(p.a, p.b) || mid >= std::max(p.a, p.b)) {
            break; // panel cannot be split further
        }
        double e1 = 0.0;
        double e2 = 0.0;
        const double v1 = detail::gk15(f, p.a, mid, e1);
        const double v2 = detail::gk15(f, mid, p.b, e2);
        *worst = {p.a, mid, v1, e1};
        panels.push_back({mid, p.b, v2, e2});
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.err;
    }
    // Re-sum to shed the drift of the running update.
    double sum = 0.0;
    for (const auto& p : panels) {
        sum += p.value;
    }
    return sum;
}

/// Integral over [a, b] with b close to 1 and an integrand that behaves like
/// C / (1 - s) there. The substitution s = 1 - exp(-t) flattens the pole.
template <class F>
double integrate_toward_one(F&& f, double a, double b, double rel_tol = 1e-12) {
    if (a == b) {
        return 0.0;
    }
    const double ta = -std::log1p(-a);
    const double tb = -std::log1p(-b);
    auto g = [&](double t) {
        const double e = std::exp(-t);
        return f(1.0 - e) * e;
    };
    return integrate(g, ta, tb, rel_tol);
}

/// Same idea at the lower endpoint: s = exp(t) for integrands like C / s.
template <class F>
double integrate_toward_zero(F&& f, double a, double b, double rel_tol = 1e-12) {
    if (a == b) {
        return 0.0;
    }
    auto g = [&](double t) {
        const double s = std::exp(t);
        return f(s) * s;
    };
    return integrate(g, std::log(a), std::log(b), rel_tol);
}

/// Integral over [a, b] inside (0, 1) of an integrand that may blow up at
/// either end of the unit interval: the piece below 1/4 is taken in log s,
/// the piece above 3/4 in -log(1 - s).
template <class F>
double integrate_unit(F&& f, double a, double b, double rel_tol = 1e-12) {
    if (a == b) {
        return 0.0;
    }
    if (a > b) {
        return -integrate_unit(f, b, a, rel_tol);
    }
    double r = 0.0;
    if (a < 0.25) {
        r += integrate_toward_zero(f, a, std::min(b, 0.25), rel_tol);
    }
    if (b > 0.25 && a < 0.75) {
        r += integrate(f, std::max(a, 0.25), std::min(b, 0.75), rel_tol);
    }
    if (b > 0.75) {
        r += integrate_toward_one(f, std::max(a, 0.75), b, rel_tol);
    }
    return r;
}

/// Integral of a function that may have an integrable singularity at either
/// endpoint (tanh-sinh never evaluates the endpoints themselves).
template <class F>
double integrate_singular(F&& f, double a, double b, double rel_tol = 1e-10) {
    if (a == b) {
        return 0.0;
    }
    boost::math::quadrature::tanh_sinh<double> integrator;
    double error = 0.0;
    double l1 = 0.0;
    return integrator.integrate(f, a, b, rel_tol, &error, &l1);
}

} // namespace bifront::numerics
