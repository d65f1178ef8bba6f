#pragma once

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace bifront::numerics {

struct Bracket {
    double lo;
    double hi;
};

/// Refines a sign-change bracket of g until its width is below x_tol.
/// Assumes g(lo) and g(hi) have opposite signs (or one of them is zero).
template <class G>
double refine_root(G&& g, double lo, double hi, double x_tol = 1e-12) {
    double glo = g(lo);
    double ghi = g(hi);
    if (glo == 0.0) {
        return lo;
    }
    if (ghi == 0.0) {
        return hi;
    }
    std::uintmax_t max_iter = 200;
    auto stop = [x_tol](double a, double b) { return std::abs(b - a) <= x_tol; };
    auto r = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, stop, max_iter);
    return 0.5 * (r.first + r.second);
}

/// All sign changes of g on a uniform grid of n cells over [a, b], in
/// increasing order, each refined to x_tol.
template <class G>
std::vector<double> scan_roots(G&& g, double a, double b, std::size_t n, double x_tol = 1e-12) {
    std::vector<double> roots;
    double x_prev = a;
    double g_prev = g(a);
    for (std::size_t i = 1; i <= n; ++i) {
        const double x = (i == n) ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
        const double gx = g(x);
        if (g_prev == 0.0) {
            if (roots.empty() || roots.back() != x_prev) {
                roots.push_back(x_prev);
            }
        } else if ((g_prev < 0.0 && gx > 0.0) || (g_prev > 0.0 && gx < 0.0)) {
            roots.push_back(refine_root(g, x_prev, x, x_tol));
        }
        x_prev = x;
        g_prev = gx;
    }
    if (g_prev == 0.0 && (roots.empty() || roots.back() != x_prev)) {
        roots.push_back(x_prev);
    }
    return roots;
}

/// Local maximiser of g on [lo, hi] (Brent's golden-section/parabolic search).
/// Returns {argmax, max}.
template <class G>
std::pair<double, double> maximize(G&& g, double lo, double hi, int bits = 40) {
    auto neg = [&](double x) { return -g(x); };
    std::uintmax_t max_iter = 500;
    auto r = boost::math::tools::brent_find_minima(neg, lo, hi, bits, max_iter);
    return {r.first, -r.second};
}

} // namespace bifront::numerics
