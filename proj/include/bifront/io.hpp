#pragma once

#include "bifront/error.hpp"
#include "bifront/limits.hpp"
#include "bifront/model.hpp"
#include "bifront/oracle.hpp"
#include "bifront/profile.hpp"
#include "bifront/reduction.hpp"
#include "bifront/speed.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace bifront::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Model schema
//
//   {"f": {"family": "logistic", "k": 1},
//    "h": {"family": "quadratic", "alpha": -0.5},
//    "lipschitz_k": 1,                 (optional)
//    "quadrature_grid_size": 4096}     (optional)
//
// f families: logistic{k}, power_logistic{p, k}, tabulated{s, f}, zero
// h families: zero, quadratic{alpha}, power{q, coef}, polynomial{coeffs},
//             tabulated{s, h, dh, d2h}
// ---------------------------------------------------------------------------

namespace detail {

inline const json& field(const json& j, const char* key, const char* where) {
    if (!j.is_object() || !j.contains(key)) {
        throw Error(ErrorKind::MalformedModel, std::string(where) + ": missing field '" + key + "'");
    }
    return j.at(key);
}

inline double number(const json& j, const char* key, const char* where) {
    const auto& v = field(j, key, where);
    if (!v.is_number()) {
        throw Error(ErrorKind::MalformedModel, std::string(where) + ": field '" + key + "' must be a number");
    }
    return v.get<double>();
}

inline std::vector<double> numbers(const json& j, const char* key, const char* where) {
    const auto& v = field(j, key, where);
    if (!v.is_array()) {
        throw Error(ErrorKind::MalformedModel, std::string(where) + ": field '" + key + "' must be an array");
    }
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) {
            throw Error(ErrorKind::MalformedModel, std::string(where) + ": '" + key + "' holds a non-number");
        }
        out.push_back(e.get<double>());
    }
    return out;
}

inline std::string family(const json& j, const char* where) {
    const auto& v = field(j, "family", where);
    if (!v.is_string()) {
        throw Error(ErrorKind::MalformedModel, std::string(where) + ": 'family' must be a string");
    }
    return v.get<std::string>();
}

} // namespace detail

inline ReactionSpec reaction_from_json(const json& j) {
    const char* w = "f";
    const auto fam = detail::family(j, w);
    if (fam == "logistic") {
        return Logistic{detail::number(j, "k", w)};
    }
    if (fam == "power_logistic") {
        return PowerLogistic{detail::number(j, "p", w), detail::number(j, "k", w)};
    }
    if (fam == "tabulated") {
        return TabulatedReaction{detail::numbers(j, "s", w), detail::numbers(j, "f", w)};
    }
    if (fam == "zero") {
        return ZeroReaction{};
    }
    throw Error(ErrorKind::MalformedModel, "f: unknown family '" + fam + "'");
}

inline ConvectionSpec convection_from_json(const json& j) {
    const char* w = "h";
    const auto fam = detail::family(j, w);
    if (fam == "zero") {
        return ZeroConvection{};
    }
    if (fam == "quadratic") {
        return QuadraticConvection{detail::number(j, "alpha", w)};
    }
    if (fam == "power") {
        return PowerConvection{detail::number(j, "q", w), detail::number(j, "coef", w)};
    }
    if (fam == "polynomial") {
        return PolynomialConvection{detail::numbers(j, "coeffs", w)};
    }
    if (fam == "tabulated") {
        return TabulatedConvection{detail::numbers(j, "s", w), detail::numbers(j, "h", w), detail::numbers(j, "dh", w),
                                   detail::numbers(j, "d2h", w)};
    }
    throw Error(ErrorKind::MalformedModel, "h: unknown family '" + fam + "'");
}

inline Model model_from_json(const json& j) {
    if (!j.is_object()) {
        throw Error(ErrorKind::MalformedModel, "model must be a JSON object");
    }
    std::optional<double> k;
    if (j.contains("lipschitz_k")) {
        k = detail::number(j, "lipschitz_k", "model");
    }
    std::size_t grid = kDefaultQuadratureGrid;
    if (j.contains("quadrature_grid_size")) {
        const auto& g = j.at("quadrature_grid_size");
        if (!g.is_number_unsigned()) {
            throw Error(ErrorKind::MalformedModel, "quadrature_grid_size must be a positive integer");
        }
        grid = g.get<std::size_t>();
    }
    return Model(reaction_from_json(detail::field(j, "f", "model")), convection_from_json(detail::field(j, "h", "model")),
                 k, grid);
}

inline json to_json(const ReactionSpec& r) {
    return std::visit(bifront::detail::overloaded{
                          [](const Logistic& x) { return json{{"family", "logistic"}, {"k", x.k}}; },
                          [](const PowerLogistic& x) { return json{{"family", "power_logistic"}, {"p", x.p}, {"k", x.k}}; },
                          [](const TabulatedReaction& x) { return json{{"family", "tabulated"}, {"s", x.s}, {"f", x.f}}; },
                          [](const ZeroReaction&) { return json{{"family", "zero"}}; },
                      },
                      r);
}

inline json to_json(const ConvectionSpec& c) {
    return std::visit(bifront::detail::overloaded{
                          [](const ZeroConvection&) { return json{{"family", "zero"}}; },
                          [](const QuadraticConvection& x) { return json{{"family", "quadratic"}, {"alpha", x.alpha}}; },
                          [](const PowerConvection& x) { return json{{"family", "power"}, {"q", x.q}, {"coef", x.coef}}; },
                          [](const PolynomialConvection& x) { return json{{"family", "polynomial"}, {"coeffs", x.coeffs}}; },
                          [](const TabulatedConvection& x) {
                              return json{{"family", "tabulated"}, {"s", x.s}, {"h", x.h}, {"dh", x.dh}, {"d2h", x.d2h}};
                          },
                      },
                      c);
}

inline json to_json(const Model& m) {
    return json{{"f", to_json(m.reaction())},
                {"h", to_json(m.convection())},
                {"lipschitz_k", m.lipschitz_k()},
                {"quadrature_grid_size", m.quadrature_grid_size()}};
}

/// FNV-1a (64 bit) of the canonical model JSON, as 16 hex digits.
inline std::string model_digest(const Model& m) {
    const std::string s = to_json(m).dump();
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char ch : s) {
        hash ^= ch;
        hash *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << hash;
    return os.str();
}

// ---------------------------------------------------------------------------
// Result records
// ---------------------------------------------------------------------------

/// NaN and infinities have no JSON spelling; they become null.
inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json to_json(const ValidationReport& r) {
    json v = json::array();
    for (const auto& x : r.violations) {
        v.push_back({{"assumption", std::string(1, x.assumption)}, {"v", x.v}, {"detail", x.detail}});
    }
    return json{{"ok", r.ok()}, {"violations", v}};
}

inline json verdict_json(const YTrajectory& t) {
    return json{{"verdict", to_string(t.verdict)},
                {"v_cross", number_or_null(t.v_cross)},
                {"y_end", number_or_null(t.y_end)},
                {"v_min_reached", number_or_null(t.v_min_reached)},
                {"threshold", t.threshold},
                {"epsilon", t.epsilon},
                {"speed", t.speed},
                {"samples", t.v.size()}};
}

inline json to_json(const CriticalSpeedResult& r, const std::string& digest) {
    return json{{"c_star", r.c_star},
                {"lower_bound", r.bounds.lower},
                {"upper_bound", r.bounds.upper},
                {"iterations", r.iterations},
                {"epsilon", r.epsilon},
                {"model_digest", digest},
                {"c_lo", r.c_lo},
                {"c_hi", r.c_hi},
                {"final_bracket_width", r.final_bracket_width},
                {"sup_S_arg", r.bounds.sup_S_arg}};
}

inline json to_json(const RegimeReport& r) {
    json j{{"regime", to_string(r.regime)},
           {"sup_S", r.sup_S},
           {"S_at_1", r.S_at_1},
           {"S_prime_min", r.S_prime_min},
           {"S_prime_max", r.S_prime_max},
           {"unique_max_fminus_hprime", r.unique_max_fminus_hprime}};
    if (r.regime == Regime::Unclassified) {
        j["theorem_hypotheses"] = "not satisfied";
        j["note"] = r.note;
    }
    return j;
}

inline json opt_json(const std::optional<double>& x) { return x ? number_or_null(*x) : json(nullptr); }

inline json to_json(const LimitAnalysis& a) {
    json segs = json::array();
    for (const auto& s : a.limit_profile.segments) {
        json js{{"kind", to_string(s.kind)}, {"z_lo", number_or_null(s.z_lo)}, {"z_hi", number_or_null(s.z_hi)}};
        if (s.kind == SegmentKind::Constant) {
            js["value"] = s.value;
        } else if (s.kind == SegmentKind::Linear) {
            js["anchor"] = {s.anchor_z, s.anchor_v};
        } else {
            js["anchor"] = {s.inviscid->z_anchor(), s.inviscid->v_anchor()};
        }
        segs.push_back(js);
    }
    json j{{"regime", to_json(a.regime)},
           {"c_bar", a.c_bar},
           {"v_plus", opt_json(a.v_plus)},
           {"z_plus", opt_json(a.z_plus)},
           {"kink_points", a.kink_points},
           {"joints", a.limit_profile.joints()},
           {"glue_point", opt_json(a.glue_point)},
           {"segments", segs}};
    if (a.regime.regime == Regime::Case1) {
        j["ell"] = opt_json(a.sharpness.ell);
        j["sharp_at_zero"] = a.sharpness.sharp;
        j["z0_finite"] = a.sharpness.z0_finite;
        j["z0"] = a.z0 ? json(*a.z0) : json("-inf");
        j["sharpness_inconclusive"] = a.sharpness.inconclusive;
    }
    return j;
}

inline json to_json(const oracle::Certification& c) {
    return json{{"quantity_id", c.quantity_id}, {"value", c.value}, {"method", c.method}, {"tolerance", c.tolerance}};
}

inline oracle::Certification certification_from_json(const json& j) {
    return {j.at("quantity_id").get<std::string>(), j.at("value").get<double>(), j.at("method").get<std::string>(),
            j.at("tolerance").get<double>()};
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace detail {

inline std::string g12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

} // namespace detail

inline void write_csv(std::ostream& os, const YTrajectory& t) {
    os << "v,y\n";
    for (std::size_t i = 0; i < t.v.size(); ++i) {
        os << detail::g12(t.v[i]) << ',' << detail::g12(t.y[i]) << '\n';
    }
}

inline void write_csv(std::ostream& os, const FrontProfile& p) {
    os << "z,v,dv\n";
    for (std::size_t i = 0; i < p.z.size(); ++i) {
        os << detail::g12(p.z[i]) << ',' << detail::g12(p.v[i]) << ',' << detail::g12(p.dv[i]) << '\n';
    }
}

inline void write_csv(std::ostream& os, const PiecewiseProfile& p, double z_lo, double z_hi, std::size_t n = 801) {
    os << "z,v,segment_tag\n";
    for (std::size_t i = 0; i < n; ++i) {
        const double z = z_lo + (z_hi - z_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        const auto& s = p.segment_at(z);
        os << detail::g12(z) << ',' << detail::g12(s.at(z)) << ',' << to_string(s.kind) << '\n';
    }
}

} // namespace bifront::io
