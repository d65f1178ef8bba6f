#pragma once

#include "bifront/error.hpp"
#include "bifront/model.hpp"
#include "bifront/numerics/quadrature.hpp"
#include "bifront/numerics/roots.hpp"
#include "bifront/speed.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

namespace bifront {

enum class Regime { Case1, Case2, Case3, Unclassified };

constexpr std::string_view to_string(Regime r) noexcept {
    switch (r) {
    case Regime::Case1: return "case1";
    case Regime::Case2: return "case2";
    case Regime::Case3: return "case3";
    case Regime::Unclassified: return "unclassified";
    }
    return "unknown";
}

inline constexpr double kClassificationTol = 1e-9;

struct RegimeReport {
    Regime regime = Regime::Unclassified;
    double sup_S = 0.0;
    double S_at_1 = 0.0;
    double S_prime_min = 0.0;
    double S_prime_max = 0.0;
    bool unique_max_fminus_hprime = false;
    std::string note; // why the theorem hypotheses fail, when they do
};

namespace detail {

/// Uniform grid of n cells on (0, 1] plus log-spaced points towards both
/// endpoints, down to a distance of 1e-6.
inline std::vector<double> regime_grid(std::size_t n) {
    std::vector<double> g;
    for (int e = 60; e > 10; --e) {
        const double d = std::pow(10.0, -0.1 * e);
        if (d < 1.0 / static_cast<double>(n)) {
            g.push_back(d);
        }
    }
    for (std::size_t j = 1; j <= n; ++j) {
        g.push_back(static_cast<double>(j) / static_cast<double>(n));
    }
    for (int e = 11; e <= 60; ++e) {
        const double d = std::pow(10.0, -0.1 * e);
        if (d < 1.0 / static_cast<double>(n)) {
            g.push_back(1.0 - d);
        }
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

/// Number of local maxima of f - h' on the grid, endpoints included.
inline int count_maxima_fminus_hprime(const Model& model, std::size_t n) {
    std::vector<double> g(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        const double s = static_cast<double>(j) / static_cast<double>(n);
        g[j] = model.f(s) - model.h_prime(s);
    }
    const double tol = 1e-13;
    int count = 0;
    std::size_t j = 0;
    while (j <= n) {
        // Treat a run of equal values as one plateau.
        std::size_t k = j;
        while (k < n && std::abs(g[k + 1] - g[j]) <= tol) {
            ++k;
        }
        const bool left_lower = j == 0 || g[j - 1] < g[j] - tol;
        const bool right_lower = k == n || g[k + 1] < g[k] - tol;
        if (left_lower && right_lower) {
            ++count;
        }
        j = k + 1;
    }
    return count;
}

} // namespace detail

/// Sign pattern of S' and the resulting case of the vanishing-diffusion
/// theorem. Never guesses: if no case applies the report says so.
inline RegimeReport classify_regime(const Model& model, double tol = kClassificationTol) {
    RegimeReport r;
    const auto grid = detail::regime_grid(model.quadrature_grid_size());
    r.S_prime_min = std::numeric_limits<double>::infinity();
    r.S_prime_max = -std::numeric_limits<double>::infinity();
    double min_open = std::numeric_limits<double>::infinity();
    for (double v : grid) {
        const double sp = evaluate_S_prime(model, v);
        r.S_prime_min = std::min(r.S_prime_min, sp);
        r.S_prime_max = std::max(r.S_prime_max, sp);
        if (v < 1.0) {
            min_open = std::min(min_open, sp);
        }
    }
    r.sup_S = detail::sup_S(model).value;
    r.S_at_1 = evaluate_S(model, 1.0);
    r.unique_max_fminus_hprime = detail::count_maxima_fminus_hprime(model, model.quadrature_grid_size()) == 1;

    if (r.S_prime_max < -tol) {
        r.regime = Regime::Case1;
    } else if (min_open > tol) {
        r.regime = Regime::Case3;
    } else if (r.sup_S > tol && std::abs(r.sup_S - r.S_at_1) > tol) {
        if (r.unique_max_fminus_hprime) {
            r.regime = Regime::Case2;
        } else {
            r.note = "f - h' has more than one maximum point";
        }
    } else {
        r.note = "S' changes sign but sup S is not attained inside (0, 1)";
    }
    return r;
}

/// Largest zero of S' in (0, 1): scan on the model grid, then refine.
inline double find_v_plus(const Model& model) {
    auto sp = [&model](double v) { return evaluate_S_prime(model, v); };
    const auto n = model.quadrature_grid_size();
    const double a = 1.0 / static_cast<double>(n);
    const auto roots = numerics::scan_roots(sp, a, 1.0 - a, n, 1e-12);
    if (roots.empty()) {
        throw Error(ErrorKind::ClassificationInconsistency, "S' has no sign change in (0, 1)");
    }
    return roots.back();
}

struct LimitSpeed {
    double c_bar = 0.0;
    Regime regime = Regime::Unclassified;
    bool theorem_value = false; // false: lower bound reported, hypotheses not met
    std::optional<double> v_plus;
};

inline LimitSpeed limit_speed(const Model& model) {
    const auto rep = classify_regime(model);
    LimitSpeed r;
    r.regime = rep.regime;
    r.theorem_value = rep.regime != Regime::Unclassified;
    switch (rep.regime) {
    case Regime::Case1: r.c_bar = 0.0; break;
    case Regime::Case2: {
        const double vp = find_v_plus(model);
        r.v_plus = vp;
        r.c_bar = model.f(vp) - model.h_prime(vp);
        break;
    }
    case Regime::Case3: r.c_bar = model.F(1.0) - model.h(1.0); break;
    case Regime::Unclassified: r.c_bar = lower_bound(model); break;
    }
    return r;
}

/// Solution of (c + h'(v)) v' = f(v) through (z_anchor, v_anchor), through its
/// inverse z(v) = z_anchor + int_{v_anchor}^{v} (c + h'(s)) / f(s) ds.
class InviscidProfile {
public:
    InviscidProfile(Model model, double c_bar, double z_anchor, double v_anchor)
        : model_(std::move(model)), c_(c_bar), z_a_(z_anchor), v_a_(v_anchor) {
        if (!(v_anchor > 0.0 && v_anchor < 1.0)) {
            throw Error(ErrorKind::InvalidInput, "anchor value must lie in (0, 1)");
        }
        if (!(c_ + model_.h_prime(v_anchor) > 0.0)) {
            throw Error(ErrorKind::InvalidInput, "c + h'(v) must be positive at the anchor");
        }
        // The largest v below the anchor where c + h' stops being positive
        // is where the solution escapes (it cannot be continued past it).
        const auto n = model_.quadrature_grid_size();
        for (std::size_t j = n; j-- > 1;) {
            const double s = static_cast<double>(j) / static_cast<double>(n);
            if (s >= v_a_) {
                continue;
            }
            if (!(c_ + model_.h_prime(s) > 0.0) && model_.f(s) > 0.0) {
                escape_ = s;
                break;
            }
        }
        for (std::size_t j = 1; j < n; ++j) {
            const double s = static_cast<double>(j) / static_cast<double>(n);
            if (s > v_a_ && !(c_ + model_.h_prime(s) > 0.0) && model_.f(s) > 0.0) {
                escape_above_ = s;
                break;
            }
        }
        z0_ = compute_z0();
    }

    double c_bar() const noexcept { return c_; }
    double z_anchor() const noexcept { return z_a_; }
    double v_anchor() const noexcept { return v_a_; }

    /// Where c + h' vanishes below the anchor while f > 0, if anywhere.
    std::optional<double> escape_point() const noexcept { return escape_; }

    /// inf { z : V_I(z) > 0 }: finite, or nullopt for minus infinity.
    std::optional<double> z0() const noexcept { return z0_; }

    double z_of(double v) const {
        if (!(v > 0.0 && v < 1.0)) {
            throw Error(ErrorKind::Domain, "z(v) needs v in (0, 1)");
        }
        check_range(v);
        auto g = [this](double s) { return integrand(s); };
        if (v == v_a_) {
            return z_a_;
        }
        return z_a_ + numerics::integrate_unit(g, v_a_, v, 1e-12);
    }

    /// V_I(z). Left of a finite z0 the value is 0; z beyond the reach of
    /// the sampled range saturates at the nearest end value.
    double v_of(double z) const {
        if (z == z_a_) {
            return v_a_;
        }
        if (z0_ && z <= *z0_) {
            return 0.0;
        }
        const double lower_limit = escape_ ? *escape_ : 0.0;
        const double upper_limit = escape_above_ ? *escape_above_ : 1.0;
        double lo = v_a_;
        double hi = v_a_;
        if (z > z_a_) {
            for (int k = 0; k < 200; ++k) {
                hi = upper_limit - 0.5 * (upper_limit - hi);
                if (hi >= upper_limit || z_of(hi) >= z) {
                    break;
                }
                lo = hi;
            }
            if (hi >= upper_limit) {
                return upper_limit;
            }
        } else {
            for (int k = 0; k < 1000; ++k) {
                lo = lower_limit + 0.5 * (lo - lower_limit);
                if (lo <= lower_limit || z_of(lo) <= z) {
                    break;
                }
                hi = lo;
            }
            if (lo <= lower_limit) {
                return lower_limit;
            }
        }
        auto g = [this, z](double s) { return z_of(s) - z; };
        return numerics::refine_root(g, lo, hi, 1e-14);
    }

private:
    double integrand(double s) const { return (c_ + model_.h_prime(s)) / model_.f(s); }

    void check_range(double v) const {
        if ((escape_ && v <= *escape_) || (escape_above_ && v >= *escape_above_)) {
            std::ostringstream os;
            os << "inviscid solution escapes: c + h' = 0 near v = " << (escape_ && v <= *escape_ ? *escape_ : *escape_above_);
            throw Error(ErrorKind::Domain, os.str());
        }
    }

    /// The integrand behaves like s^p near 0; the integral towards 0
    /// converges iff p > -1. p is read off a log-log slope.
    std::optional<double> compute_z0() const {
        if (escape_) {
            return std::nullopt;
        }
        const double s1 = 1e-9;
        const double s2 = 1e-10;
        const double g1 = integrand(s1);
        const double g2 = integrand(s2);
        if (!(g1 > 0.0 && g2 > 0.0) || !std::isfinite(g1) || !std::isfinite(g2)) {
            return std::nullopt;
        }
        const double p = std::log(g1 / g2) / std::log(s1 / s2);
        if (p <= -0.99) {
            return std::nullopt;
        }
        auto g = [this](double s) { return integrand(s); };
        const double split = std::min(0.25, v_a_);
        return z_a_ - numerics::integrate_singular(g, 0.0, split, 1e-12) - numerics::integrate_unit(g, split, v_a_, 1e-12);
    }

    Model model_;
    double c_;
    double z_a_;
    double v_a_;
    std::optional<double> escape_;
    std::optional<double> escape_above_;
    std::optional<double> z0_;
};

struct Sharpness {
    std::optional<double> ell; // lim f/h' at 0+
    bool sharp = false;        // ell > 0
    bool z0_finite = false;    // int_0 h'/f converges
    bool inconclusive = false;
};

/// ell = lim_{s->0+} f(s)/h'(s) by Aitken extrapolation along s = 10^-k,
/// and finiteness of z0 from the local exponent of h'/f.
inline Sharpness sharpness_at_zero(const Model& model) {
    Sharpness r;
    std::vector<double> ratio;
    for (int k = 3; k <= 12; ++k) {
        const double s = std::pow(10.0, -k);
        const double hp = model.h_prime(s);
        if (!(hp > 0.0)) {
            r.inconclusive = true;
            return r;
        }
        ratio.push_back(model.f(s) / hp);
    }
    std::vector<double> acc;
    for (std::size_t i = 0; i + 2 < ratio.size(); ++i) {
        const double d1 = ratio[i + 2] - ratio[i + 1];
        const double d2 = ratio[i + 2] - 2.0 * ratio[i + 1] + ratio[i];
        acc.push_back(std::abs(d2) > 1e-300 ? ratio[i + 2] - d1 * d1 / d2 : ratio[i + 2]);
    }
    const double last = acc.back();
    const double prev = acc[acc.size() - 2];
    if (std::abs(last - prev) > 1e-6 * std::max(1.0, std::abs(last))) {
        r.inconclusive = true;
    }
    r.ell = std::abs(last) < 1e-6 ? 0.0 : last;
    r.sharp = *r.ell > 0.0;

    const double s1 = 1e-9;
    const double s2 = 1e-10;
    const double g1 = model.h_prime(s1) / model.f(s1);
    const double g2 = model.h_prime(s2) / model.f(s2);
    const double p = std::log(g1 / g2) / std::log(s1 / s2);
    r.z0_finite = p > -0.99;
    return r;
}

enum class SegmentKind { Constant, Linear, Inviscid };

constexpr std::string_view to_string(SegmentKind k) noexcept {
    switch (k) {
    case SegmentKind::Constant: return "constant";
    case SegmentKind::Linear: return "linear";
    case SegmentKind::Inviscid: return "inviscid";
    }
    return "unknown";
}

/// One piece of the limit profile on [z_lo, z_hi] (infinite ends allowed).
struct Segment {
    SegmentKind kind;
    double z_lo;
    double z_hi;
    double value = 0.0;    // Constant
    double anchor_z = 0.0; // Linear: v = anchor_v + (z - anchor_z)
    double anchor_v = 0.0;
    std::shared_ptr<const InviscidProfile> inviscid;

    double at(double z) const {
        switch (kind) {
        case SegmentKind::Constant: return value;
        case SegmentKind::Linear: return anchor_v + (z - anchor_z);
        case SegmentKind::Inviscid: return inviscid->v_of(z);
        }
        return 0.0;
    }
};

struct PiecewiseProfile {
    std::vector<Segment> segments;

    const Segment& segment_at(double z) const {
        for (const auto& s : segments) {
            if (z <= s.z_hi) {
                return s;
            }
        }
        return segments.back();
    }

    double at(double z) const { return segment_at(z).at(z); }

    std::vector<double> joints() const {
        std::vector<double> j;
        for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
            j.push_back(segments[i].z_hi);
        }
        return j;
    }
};

struct LimitAnalysis {
    RegimeReport regime;
    double c_bar = 0.0;
    std::optional<double> v_plus;
    std::optional<double> z_plus;
    std::vector<double> kink_points;  // joints where the derivative jumps
    std::optional<double> glue_point; // C1 joint between the linear and inviscid parts
    Sharpness sharpness;
    std::optional<double> z0; // nullopt: minus infinity (or not applicable)
    PiecewiseProfile limit_profile;
};

inline LimitAnalysis limit_analysis(const Model& model) {
    LimitAnalysis a;
    a.regime = classify_regime(model);
    const double inf = std::numeric_limits<double>::infinity();
    switch (a.regime.regime) {
    case Regime::Unclassified: {
        std::string msg = "theorem hypotheses not satisfied";
        if (!a.regime.note.empty()) {
            msg += ": " + a.regime.note;
        }
        throw Error(ErrorKind::UnsupportedRegime, msg);
    }
    case Regime::Case3: {
        a.c_bar = model.F(1.0) - model.h(1.0);
        a.limit_profile.segments = {
            {SegmentKind::Constant, -inf, -0.5, 0.0},
            {SegmentKind::Linear, -0.5, 0.5, 0.0, 0.0, 0.5},
            {SegmentKind::Constant, 0.5, inf, 1.0},
        };
        a.kink_points = {-0.5, 0.5};
        break;
    }
    case Regime::Case2: {
        const double vp = find_v_plus(model);
        a.v_plus = vp;
        a.c_bar = model.f(vp) - model.h_prime(vp);
        if (vp >= 0.5) {
            auto vi = std::make_shared<const InviscidProfile>(model, a.c_bar, vp - 0.5, vp);
            a.limit_profile.segments = {
                {SegmentKind::Constant, -inf, -0.5, 0.0},
                {SegmentKind::Linear, -0.5, vp - 0.5, 0.0, 0.0, 0.5},
                {SegmentKind::Inviscid, vp - 0.5, inf, 0.0, 0.0, 0.0, vi},
            };
            a.kink_points = {-0.5};
            a.glue_point = vp - 0.5;
        } else {
            auto vi = std::make_shared<const InviscidProfile>(model, a.c_bar, 0.0, 0.5);
            const double zp = vi->z_of(vp);
            a.z_plus = zp;
            a.limit_profile.segments = {
                {SegmentKind::Constant, -inf, zp - vp, 0.0},
                {SegmentKind::Linear, zp - vp, zp, 0.0, zp, vp},
                {SegmentKind::Inviscid, zp, inf, 0.0, 0.0, 0.0, vi},
            };
            a.kink_points = {zp - vp};
            a.glue_point = zp;
        }
        break;
    }
    case Regime::Case1: {
        a.c_bar = 0.0;
        a.sharpness = sharpness_at_zero(model);
        auto vi = std::make_shared<const InviscidProfile>(model, 0.0, 0.0, 0.5);
        if (vi->escape_point()) {
            std::ostringstream os;
            os << "inviscid profile escapes at v = " << *vi->escape_point();
            throw Error(ErrorKind::UnsupportedRegime, os.str());
        }
        a.z0 = vi->z0();
        if (a.z0) {
            a.limit_profile.segments = {
                {SegmentKind::Constant, -inf, *a.z0, 0.0},
                {SegmentKind::Inviscid, *a.z0, inf, 0.0, 0.0, 0.0, vi},
            };
            if (a.sharpness.sharp) {
                a.kink_points = {*a.z0};
            }
        } else {
            a.limit_profile.segments = {{SegmentKind::Inviscid, -inf, inf, 0.0, 0.0, 0.0, vi}};
        }
        break;
    }
    }
    return a;
}

inline PiecewiseProfile limit_profile(const Model& model) { return limit_analysis(model).limit_profile; }

/// sup over an evenly sampled z window of |v_eps(z) - vbar(z)|.
template <class Profile>
double distance_to_limit(const Profile& v_eps, const PiecewiseProfile& vbar, double z_lo = -0.4, double z_hi = 0.4,
                         std::size_t n = 801) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = z_lo + (z_hi - z_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        worst = std::max(worst, std::abs(v_eps.v_at(z) - vbar.at(z)));
    }
    return worst;
}

struct LinearPieceReport {
    std::vector<double> eps;
    std::vector<double> c_star;
    std::vector<double> y0; // y_eps(v0)
    std::vector<double> y1; // y_eps(v1)
    double c_extrapolated = 0.0;
    double y0_extrapolated = 0.0;
    double y1_extrapolated = 0.0;
    double identity_value = 0.0; // right-hand side of the identity
    double residual = 0.0;       // |c_extrapolated - identity_value|
    double c_bar = 0.0;          // theorem value for comparison
    bool passed = false;
};

namespace detail {

/// Limit of a(eps) as eps -> 0 from the last three samples, assuming
/// a = a0 + C eps^p with p fitted from the data.
inline double richardson_limit(const std::vector<double>& eps, const std::vector<double>& a) {
    const std::size_t n = a.size();
    const double e1 = eps[n - 3];
    const double e2 = eps[n - 2];
    const double e3 = eps[n - 1];
    const double a1 = a[n - 3];
    const double a2 = a[n - 2];
    const double a3 = a[n - 1];
    const double d12 = a1 - a2;
    const double d23 = a2 - a3;
    if (std::abs(d23) < 1e-14 || d12 / d23 <= 0.0) {
        return a3;
    }
    const double target = d12 / d23;
    auto g = [&](double p) {
        return (std::pow(e1, p) - std::pow(e2, p)) / (std::pow(e2, p) - std::pow(e3, p)) - target;
    };
    const double glo = g(0.05);
    const double ghi = g(4.0);
    if (glo * ghi > 0.0) {
        return a3;
    }
    const double p = numerics::refine_root(g, 0.05, 4.0, 1e-12);
    const double C = d23 / (std::pow(e2, p) - std::pow(e3, p));
    return a3 - C * std::pow(e3, p);
}

} // namespace detail

/// Checks c = [F(v1) - F(v0) - h(v1) + h(v0) + ybar(v1) - ybar(v0)] / (v1 - v0)
/// with ybar and c extrapolated from critical solutions at the given eps.
inline LinearPieceReport check_linear_piece_identity(const Model& model, const std::vector<double>& eps_list,
                                                     double v0, double v1, double threshold = 1e-3,
                                                     const SpeedOptions& opt = {}) {
    if (!(v0 < v1) || v0 < 0.0 || v1 > 1.0) {
        throw Error(ErrorKind::InvalidInput, "need 0 <= v0 < v1 <= 1");
    }
    if (eps_list.size() < 3) {
        throw Error(ErrorKind::InvalidInput, "extrapolation needs at least three eps values");
    }
    LinearPieceReport r;
    r.eps = eps_list;
    auto y_of = [](const YTrajectory& t, double v) {
        if (v <= t.v.back()) {
            return 0.0; // y(0) = 0; the stored tail below v_min is below threshold
        }
        if (v >= t.v.front()) {
            return 0.0;
        }
        return t.y_at(v);
    };
    for (double eps : eps_list) {
        const auto cs = critical_speed(model, eps, opt);
        r.c_star.push_back(cs.c_star);
        r.y0.push_back(y_of(cs.trajectory_at_c_star, v0));
        r.y1.push_back(y_of(cs.trajectory_at_c_star, v1));
    }
    r.c_extrapolated = detail::richardson_limit(r.eps, r.c_star);
    r.y0_extrapolated = detail::richardson_limit(r.eps, r.y0);
    r.y1_extrapolated = detail::richardson_limit(r.eps, r.y1);
    r.identity_value = (model.F(v1) - model.F(v0) - model.h(v1) + model.h(v0) + r.y1_extrapolated - r.y0_extrapolated) /
                       (v1 - v0);
    r.residual = std::abs(r.c_extrapolated - r.identity_value);
    r.c_bar = limit_speed(model).c_bar;
    r.passed = r.residual <= threshold;
    return r;
}

} // namespace bifront
