#pragma once

#include "bifront/error.hpp"
#include "bifront/numerics/quadrature.hpp"

#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace bifront {

// ---------------------------------------------------------------------------
// Reaction term f
// ---------------------------------------------------------------------------

/// f(s) = k s (1 - s)
struct Logistic {
    double k = 1.0;
};

/// f(s) = k s^p (1 - s)
struct PowerLogistic {
    double p = 2.0;
    double k = 1.0;
};

/// Samples of f on [0, 1]; interpolated with a monotone (PCHIP) cubic.
struct TabulatedReaction {
    std::vector<double> s;
    std::vector<double> f;
};

/// f == 0. Only meaningful for pure-convection checks; exempt from (F).
struct ZeroReaction {};

using ReactionSpec = std::variant<Logistic, PowerLogistic, TabulatedReaction, ZeroReaction>;

// ---------------------------------------------------------------------------
// Convection term h
// ---------------------------------------------------------------------------

struct ZeroConvection {};

/// h(s) = alpha s^2
struct QuadraticConvection {
    double alpha = 0.0;
};

/// h(s) = coef s^q
struct PowerConvection {
    double q = 2.0;
    double coef = 1.0;
};

/// h(s) = sum_i coeffs[i] s^i
struct PolynomialConvection {
    std::vector<double> coeffs;
};

/// Samples of h, h', h'' on [0, 1]. h and h' use cubic Hermite interpolation
/// on (value, derivative) pairs, h'' is piecewise linear.
struct TabulatedConvection {
    std::vector<double> s;
    std::vector<double> h;
    std::vector<double> dh;
    std::vector<double> d2h;
};

using ConvectionSpec = std::variant<ZeroConvection, QuadraticConvection, PowerConvection,
                                    PolynomialConvection, TabulatedConvection>;

inline constexpr std::size_t kMinTabulatedSamples = 16;
inline constexpr std::size_t kDefaultQuadratureGrid = 4096;

struct PointValues {
    double f;
    double f_at_bounds_clamped;
    double h;
    double h_prime;
    double F;
};

/// One failed standing assumption, with the point that witnesses it.
struct Violation {
    char assumption; // 'F' or 'H'
    double v;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const noexcept { return violations.empty(); }
};

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline void check_samples(const std::vector<double>& s, std::size_t other, const char* what) {
    if (s.size() < kMinTabulatedSamples) {
        std::ostringstream os;
        os << what << " needs at least " << kMinTabulatedSamples << " samples, got " << s.size();
        throw Error(ErrorKind::MalformedModel, os.str());
    }
    if (other != s.size()) {
        throw Error(ErrorKind::MalformedModel, std::string(what) + ": sample arrays differ in length");
    }
    if (s.front() != 0.0 || s.back() != 1.0) {
        throw Error(ErrorKind::MalformedModel, std::string(what) + ": abscissae must span [0, 1]");
    }
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (!(s[i] > s[i - 1])) {
            throw Error(ErrorKind::MalformedModel, std::string(what) + ": abscissae must increase strictly");
        }
    }
}

struct ModelData {
    ReactionSpec reaction;
    ConvectionSpec convection;
    double lipschitz_k = 0.0;
    std::size_t grid = kDefaultQuadratureGrid;

    std::optional<boost::math::interpolators::pchip<std::vector<double>>> f_table;
    std::optional<boost::math::interpolators::cubic_hermite<std::vector<double>>> h_table;
    std::optional<boost::math::interpolators::cubic_hermite<std::vector<double>>> dh_table;

    // Cumulative integral of f at the nodes j / grid.
    std::vector<double> F_nodes;
};

} // namespace detail

/// The pair (f, h) together with the cached antiderivative F. Immutable and
/// cheap to copy; all state lives behind a shared const pointer.
class Model {
public:
    Model(ReactionSpec reaction, ConvectionSpec convection,
          std::optional<double> lipschitz_k = std::nullopt,
          std::size_t quadrature_grid_size = kDefaultQuadratureGrid) {
        if (quadrature_grid_size < 16) {
            throw Error(ErrorKind::MalformedModel, "quadrature_grid_size must be at least 16");
        }
        auto d = std::make_shared<detail::ModelData>();
        d->reaction = std::move(reaction);
        d->convection = std::move(convection);
        d->grid = quadrature_grid_size;

        if (auto* t = std::get_if<TabulatedReaction>(&d->reaction)) {
            detail::check_samples(t->s, t->f.size(), "tabulated f");
            d->f_table.emplace(std::vector<double>(t->s), std::vector<double>(t->f));
        }
        if (auto* t = std::get_if<TabulatedConvection>(&d->convection)) {
            detail::check_samples(t->s, t->h.size(), "tabulated h");
            detail::check_samples(t->s, t->dh.size(), "tabulated h'");
            detail::check_samples(t->s, t->d2h.size(), "tabulated h''");
            d->h_table.emplace(std::vector<double>(t->s), std::vector<double>(t->h),
                               std::vector<double>(t->dh));
            d->dh_table.emplace(std::vector<double>(t->s), std::vector<double>(t->dh),
                                std::vector<double>(t->d2h));
        }
        if (auto* p = std::get_if<PolynomialConvection>(&d->convection); p && p->coeffs.empty()) {
            p->coeffs.push_back(0.0);
        }
        data_ = d;

        d->F_nodes = build_antiderivative_table();
        d->lipschitz_k = lipschitz_k ? *lipschitz_k : estimate_lipschitz_k();
        if (!(d->lipschitz_k >= 0.0) || !std::isfinite(d->lipschitz_k)) {
            throw Error(ErrorKind::MalformedModel, "lipschitz_k must be a finite nonnegative number");
        }
    }

    const ReactionSpec& reaction() const noexcept { return data_->reaction; }
    const ConvectionSpec& convection() const noexcept { return data_->convection; }
    double lipschitz_k() const noexcept { return data_->lipschitz_k; }
    std::size_t quadrature_grid_size() const noexcept { return data_->grid; }

    /// f == 0 pure-convection mode: (F) is not checked.
    bool reaction_free() const noexcept { return std::holds_alternative<ZeroReaction>(data_->reaction); }

    double f(double v) const {
        check_domain(v);
        return f_unchecked(v);
    }

    double h(double v) const {
        check_domain(v);
        return std::visit(
            detail::overloaded{
                [](const ZeroConvection&) { return 0.0; },
                [v](const QuadraticConvection& c) { return c.alpha * v * v; },
                [v](const PowerConvection& c) { return c.coef * std::pow(v, c.q); },
                [v](const PolynomialConvection& c) { return horner(c.coeffs, v); },
                [this, v](const TabulatedConvection&) { return (*data_->h_table)(v); },
            },
            data_->convection);
    }

    double h_prime(double v) const {
        check_domain(v);
        return std::visit(
            detail::overloaded{
                [](const ZeroConvection&) { return 0.0; },
                [v](const QuadraticConvection& c) { return 2.0 * c.alpha * v; },
                [v](const PowerConvection& c) {
                    if (v == 0.0) {
                        if (c.q > 1.0) return 0.0;
                        if (c.q == 1.0) return c.coef;
                        return std::copysign(std::numeric_limits<double>::infinity(), c.coef);
                    }
                    return c.coef * c.q * std::pow(v, c.q - 1.0);
                },
                [v](const PolynomialConvection& c) { return horner_derivative(c.coeffs, v, 1); },
                [this, v](const TabulatedConvection&) { return (*data_->dh_table)(v); },
            },
            data_->convection);
    }

    double h_second(double v) const {
        check_domain(v);
        return std::visit(
            detail::overloaded{
                [](const ZeroConvection&) { return 0.0; },
                [](const QuadraticConvection& c) { return 2.0 * c.alpha; },
                [v](const PowerConvection& c) {
                    const double a = c.coef * c.q * (c.q - 1.0);
                    if (a == 0.0) return 0.0;
                    if (v == 0.0) {
                        if (c.q > 2.0) return 0.0;
                        if (c.q == 2.0) return a;
                        return std::copysign(std::numeric_limits<double>::infinity(), a);
                    }
                    return a * std::pow(v, c.q - 2.0);
                },
                [v](const PolynomialConvection& c) { return horner_derivative(c.coeffs, v, 2); },
                [this, v](const TabulatedConvection& t) { return linear_interp(t.s, t.d2h, v); },
            },
            data_->convection);
    }

    /// F(v) = integral of f over [0, v]; cached node values plus one adaptive
    /// Gauss-Kronrod panel.
    double F(double v) const {
        check_domain(v);
        const auto n = data_->grid;
        const double x = v * static_cast<double>(n);
        auto j = static_cast<std::size_t>(x);
        if (j >= n) {
            return data_->F_nodes[n];
        }
        const double node = static_cast<double>(j) / static_cast<double>(n);
        auto fv = [this](double s) { return f_unchecked(s); };
        return data_->F_nodes[j] + numerics::integrate(fv, node, v, 1e-14);
    }

    /// Limit slope m = lim (f(1-d)/d) as d -> 0+, i.e. -f'(1) for smooth f.
    double reaction_slope_at_one() const {
        return std::visit(
            detail::overloaded{
                [](const Logistic& r) { return r.k; },
                [](const PowerLogistic& r) { return r.k; },
                [](const ZeroReaction&) { return 0.0; },
                [](const TabulatedReaction& t) {
                    const std::size_t n = t.s.size();
                    const double d = t.s[n - 1] - t.s[n - 2];
                    return (t.f[n - 2] - t.f[n - 1]) / d;
                },
            },
            data_->reaction);
    }

private:
    static void check_domain(double v) {
        if (!(v >= 0.0 && v <= 1.0)) {
            std::ostringstream os;
            os << "v = " << v << " outside [0, 1]";
            throw Error(ErrorKind::Domain, os.str());
        }
    }

    static double horner(const std::vector<double>& c, double v) {
        double r = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) {
            r = r * v + *it;
        }
        return r;
    }

    static double horner_derivative(const std::vector<double>& c, double v, int order) {
        double r = 0.0;
        for (std::size_t i = c.size(); i-- > static_cast<std::size_t>(order);) {
            double factor = 1.0;
            for (int m = 0; m < order; ++m) {
                factor *= static_cast<double>(i - static_cast<std::size_t>(m));
            }
            r = r * v + factor * c[i];
        }
        return r;
    }

    static double linear_interp(const std::vector<double>& s, const std::vector<double>& y, double v) {
        auto it = std::upper_bound(s.begin(), s.end(), v);
        if (it == s.begin()) return y.front();
        if (it == s.end()) return y.back();
        const auto i = static_cast<std::size_t>(it - s.begin());
        const double t = (v - s[i - 1]) / (s[i] - s[i - 1]);
        return y[i - 1] + t * (y[i] - y[i - 1]);
    }

    double f_unchecked(double v) const {
        return std::visit(
            detail::overloaded{
                [v](const Logistic& r) { return r.k * v * (1.0 - v); },
                [v](const PowerLogistic& r) { return r.k * std::pow(v, r.p) * (1.0 - v); },
                [](const ZeroReaction&) { return 0.0; },
                [this, v](const TabulatedReaction&) { return (*data_->f_table)(v); },
            },
            data_->reaction);
    }

    std::vector<double> build_antiderivative_table() const {
        const auto n = data_->grid;
        std::vector<double> nodes(n + 1, 0.0);
        auto fv = [this](double s) { return f_unchecked(s); };
        for (std::size_t j = 0; j < n; ++j) {
            const double a = static_cast<double>(j) / static_cast<double>(n);
            const double b = static_cast<double>(j + 1) / static_cast<double>(n);
            nodes[j + 1] = nodes[j] + numerics::integrate(fv, a, b, 1e-14);
        }
        return nodes;
    }

    double estimate_lipschitz_k() const {
        if (const auto* r = std::get_if<Logistic>(&data_->reaction)) {
            return r->k;
        }
        const auto n = data_->grid;
        double k = 0.0;
        for (std::size_t j = 1; j < n; ++j) {
            const double s = static_cast<double>(j) / static_cast<double>(n);
            k = std::max(k, f_unchecked(s) / std::min(s, 1.0 - s));
        }
        return k;
    }

    std::shared_ptr<const detail::ModelData> data_;
};

// ---------------------------------------------------------------------------
// Free operations
// ---------------------------------------------------------------------------

inline PointValues evaluate(const Model& model, double v) {
    PointValues p{};
    p.f = model.f(v);
    p.f_at_bounds_clamped = (v == 0.0 || v == 1.0) ? 0.0 : p.f;
    p.h = model.h(v);
    p.h_prime = model.h_prime(v);
    p.F = model.F(v);
    return p;
}

/// S(v) = (F(v) - h(v)) / v, continued by S(0) = 0.
inline double evaluate_S(const Model& model, double v) {
    if (v == 0.0) {
        return 0.0;
    }
    return (model.F(v) - model.h(v)) / v;
}

/// S'(v) = (f(v) - h'(v) - S(v)) / v on (0, 1].
inline double evaluate_S_prime(const Model& model, double v) {
    if (!(v > 0.0 && v <= 1.0)) {
        std::ostringstream os;
        os << "S' requires v in (0, 1], got " << v;
        throw Error(ErrorKind::Domain, os.str());
    }
    return (model.f(v) - model.h_prime(v) - evaluate_S(model, v)) / v;
}

/// Checks (F) and (H) on the model's uniform grid. At most one violation is
/// reported per failed condition, witnessed by the first offending point.
inline ValidationReport validate(const Model& model) {
    constexpr double tol = 1e-12;
    ValidationReport report;
    const auto n = model.quadrature_grid_size();
    auto node = [n](std::size_t j) { return static_cast<double>(j) / static_cast<double>(n); };
    auto add = [&report](char a, double v, std::string detail) {
        report.violations.push_back({a, v, std::move(detail)});
    };

    if (!model.reaction_free()) {
        if (std::abs(model.f(0.0)) > tol) add('F', 0.0, "f(0) != 0");
        if (std::abs(model.f(1.0)) > tol) add('F', 1.0, "f(1) != 0");
        const double k = model.lipschitz_k();
        bool sign_bad = false;
        bool left_bad = false;
        bool right_bad = false;
        for (std::size_t j = 1; j < n; ++j) {
            const double s = node(j);
            const double fs = model.f(s);
            if (!sign_bad && !(fs > 0.0)) {
                add('F', s, "f is not positive inside (0, 1)");
                sign_bad = true;
            }
            if (!left_bad && fs > k * s * (1.0 + tol) + tol) {
                add('F', s, "f(s) > k s");
                left_bad = true;
            }
            if (!right_bad && fs > k * (1.0 - s) * (1.0 + tol) + tol) {
                add('F', s, "f(s) > k (1 - s)");
                right_bad = true;
            }
        }
    }

    if (std::abs(model.h(0.0)) > tol) add('H', 0.0, "h(0) != 0");
    const double hp0 = model.h_prime(0.0);
    if (!(std::abs(hp0) <= tol)) add('H', 0.0, "h'(0) != 0");
    // h'' is sampled on (0, 1]; the endpoint 0 is left out so that s^q with
    // 1 < q < 2 (finite h', unbounded h'' at 0) is accepted.
    for (std::size_t j = 1; j <= n; ++j) {
        const double s = node(j);
        if (!std::isfinite(model.h_prime(s)) || !std::isfinite(model.h_second(s))) {
            add('H', s, "h is not twice differentiable");
            break;
        }
    }
    return report;
}

} // namespace bifront
