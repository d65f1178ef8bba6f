// Command-line driver: critical speeds, regime analysis, eps sweeps, figure
// data and oracle certification.

#include "bifront/io.hpp"
#include "bifront/limits.hpp"
#include "bifront/oracle.hpp"
#include "bifront/profile.hpp"
#include "bifront/speed.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using bifront::Error;
using bifront::ErrorKind;
using bifront::Model;
using nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct ModelOptions {
    std::string preset = "fisher-burgers";
    std::string file;
    double k = 1.0;
    double alpha = 0.0;
    double q = 1.5;
    double coef = 1.0;
    double p = 2.0;

    void attach(CLI::App* app) {
        app->add_option("--model", preset, "fisher-burgers | logistic-power | degenerate-fisher | pure-convection")
            ->check(CLI::IsMember({"fisher-burgers", "logistic-power", "degenerate-fisher", "pure-convection"}));
        app->add_option("--model-file", file, "JSON model file (overrides --model)")->check(CLI::ExistingFile);
        app->add_option("--k", k, "reaction scale k");
        app->add_option("--alpha", alpha, "convection coefficient for h = alpha s^2");
        app->add_option("--q", q, "exponent for h = coef s^q (logistic-power)");
        app->add_option("--coef", coef, "coefficient for h = coef s^q (logistic-power)");
        app->add_option("--p", p, "exponent for f = k s^p (1 - s) (degenerate-fisher)");
    }

    Model build() const {
        if (!file.empty()) {
            std::ifstream in(file);
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw Error(ErrorKind::MalformedModel, std::string("cannot parse model file: ") + e.what());
            }
            return bifront::io::model_from_json(j);
        }
        if (preset == "fisher-burgers") {
            return Model(bifront::Logistic{k}, bifront::QuadraticConvection{alpha});
        }
        if (preset == "logistic-power") {
            return Model(bifront::Logistic{k}, bifront::PowerConvection{q, coef});
        }
        if (preset == "degenerate-fisher") {
            return Model(bifront::PowerLogistic{p, k}, bifront::QuadraticConvection{alpha});
        }
        return Model(bifront::ZeroReaction{}, bifront::PolynomialConvection{{0.0, 0.0, 1.0, -1.0}});
    }
};

/// BIFRONT_TOL_OVERRIDE scales every solver tolerance by the given factor.
double tolerance_scale() {
    const char* env = std::getenv("BIFRONT_TOL_OVERRIDE");
    if (env == nullptr || *env == '\0') {
        return 1.0;
    }
    char* end = nullptr;
    const double s = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(s > 0.0) || !std::isfinite(s)) {
        throw Error(ErrorKind::InvalidInput, std::string("BIFRONT_TOL_OVERRIDE must be a positive number, got '") + env + "'");
    }
    return s;
}

bifront::SpeedOptions speed_options(double tol_c) {
    const double s = tolerance_scale();
    bifront::SpeedOptions o;
    o.tol_c = tol_c * s;
    o.integration.rel_tol *= s;
    o.integration.abs_tol *= s;
    return o;
}

/// Validation gate shared by all model-consuming commands.
Model checked_model(const ModelOptions& mo) {
    Model m = mo.build();
    const auto rep = bifront::validate(m);
    if (!rep.ok()) {
        std::cerr << bifront::io::to_json(rep).dump(2) << '\n';
        throw Error(ErrorKind::ConstraintViolation, "model violates the standing assumptions");
    }
    return m;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::InvalidInput, "cannot write " + path);
    }
    out << content;
}

template <class T>
std::string csv_of(const T& x) {
    std::ostringstream os;
    bifront::io::write_csv(os, x);
    return os.str();
}

// --- critical-speed --------------------------------------------------------

struct CriticalSpeedCmd {
    ModelOptions model;
    double eps = 0.0;
    double tol_c = 1e-6;
    std::string profile_path;
    std::string trajectory_path;
    std::string format = "json";

    int run() const {
        const Model m = checked_model(model);
        const auto r = bifront::critical_speed(m, eps, speed_options(tol_c));
        json j = bifront::io::to_json(r, bifront::io::model_digest(m));
        if (!profile_path.empty()) {
            const bifront::FrontProblem p(m, eps, r.trajectory_at_c_star.speed);
            const auto prof = bifront::reconstruct(r.trajectory_at_c_star, p);
            write_file(profile_path, csv_of(prof));
            j["profile_residual"] = bifront::residual_second_order(prof, m).max_abs;
        }
        if (!trajectory_path.empty()) {
            write_file(trajectory_path, csv_of(r.trajectory_at_c_star));
        }
        if (format == "csv") {
            std::cout << "epsilon,c_star,lower_bound,upper_bound,iterations,model_digest\n"
                      << bifront::io::detail::g12(eps) << ',' << bifront::io::detail::g12(r.c_star) << ','
                      << bifront::io::detail::g12(r.bounds.lower) << ',' << bifront::io::detail::g12(r.bounds.upper)
                      << ',' << r.iterations << ',' << j["model_digest"].get<std::string>() << '\n';
        } else {
            std::cout << j.dump(2) << '\n';
        }
        return 0;
    }
};

// --- classify --------------------------------------------------------------

struct ClassifyCmd {
    ModelOptions model;
    std::string profile_path;
    double z_lo = -2.0;
    double z_hi = 2.0;

    int run() const {
        const Model m = checked_model(model);
        const auto rep = bifront::classify_regime(m);
        json j;
        if (rep.regime == bifront::Regime::Unclassified) {
            j = bifront::io::to_json(rep);
            j["c_bar_lower_bound"] = bifront::limit_speed(m).c_bar;
        } else {
            const auto a = bifront::limit_analysis(m);
            j = bifront::io::to_json(a);
            if (!profile_path.empty()) {
                std::ostringstream os;
                bifront::io::write_csv(os, a.limit_profile, z_lo, z_hi);
                write_file(profile_path, os.str());
            }
        }
        std::cout << j.dump(2) << '\n';
        return 0;
    }
};

// --- sweep -----------------------------------------------------------------

struct SweepCmd {
    ModelOptions model;
    std::vector<double> eps_list;
    double tol_c = 1e-6;
    double z_lo = -0.4;
    double z_hi = 0.4;
    std::string output;

    int run() const {
        for (std::size_t i = 1; i < eps_list.size(); ++i) {
            if (!(eps_list[i] < eps_list[i - 1])) {
                throw Error(ErrorKind::InvalidInput, "--eps-list must be strictly decreasing");
            }
        }
        const Model m = checked_model(model);
        const auto opt = speed_options(tol_c);
        std::optional<bifront::PiecewiseProfile> limit;
        std::string limit_error;
        try {
            limit = bifront::limit_profile(m);
        } catch (const Error& e) {
            limit_error = e.what();
        }

        std::ostringstream os;
        os << "epsilon,c_star,distance,c_monotone,distance_monotone,error\n";
        double prev_c = std::numeric_limits<double>::infinity();
        double prev_d = std::numeric_limits<double>::infinity();
        for (double eps : eps_list) {
            os << bifront::io::detail::g12(eps) << ',';
            try {
                const auto r = bifront::critical_speed(m, eps, opt);
                std::string dist = "nan";
                bool d_ok = true;
                if (limit) {
                    const bifront::FrontProblem p(m, eps, r.trajectory_at_c_star.speed);
                    const auto prof = bifront::reconstruct(r.trajectory_at_c_star, p);
                    const double d = bifront::distance_to_limit(prof, *limit, z_lo, z_hi);
                    dist = bifront::io::detail::g12(d);
                    d_ok = d < prev_d;
                    prev_d = d;
                }
                const bool c_ok = r.c_star <= prev_c + opt.tol_c;
                prev_c = r.c_star;
                os << bifront::io::detail::g12(r.c_star) << ',' << dist << ',' << (c_ok ? 1 : 0) << ','
                   << (d_ok ? 1 : 0) << ',' << limit_error << '\n';
            } catch (const Error& e) {
                os << "nan,nan,0,0," << '"' << e.what() << '"' << '\n';
            }
        }
        if (output.empty()) {
            std::cout << os.str();
        } else {
            write_file(output, os.str());
        }
        return 0;
    }
};

// --- figures ---------------------------------------------------------------

struct Panel {
    std::string id;
    Model model;
    double eps;
};

std::vector<Panel> figure_panels() {
    using namespace bifront;
    std::vector<Panel> p;
    auto fb = [](double a) { return Model(Logistic{1.0}, QuadraticConvection{a}); };
    p.push_back({"fisher-burgers_alpha=1_eps=2e-3", fb(1.0), 2e-3});
    p.push_back({"fisher-burgers_alpha=0.5_eps=2e-3", fb(0.5), 2e-3});
    p.push_back({"fisher-burgers_alpha=0.05_eps=2e-3", fb(0.05), 2e-3});
    p.push_back({"fisher-burgers_alpha=-0.05_eps=2e-3", fb(-0.05), 2e-3});
    p.push_back({"fisher-burgers_alpha=-1|6_eps=2e-3", fb(-1.0 / 6.0), 2e-3});
    p.push_back({"fisher-burgers_alpha=-0.5_eps=2e-3", fb(-0.5), 2e-3});
    p.push_back({"fisher-burgers_alpha=1_eps=2e-4", fb(1.0), 2e-4});
    const Model lp(Logistic{1.0}, PowerConvection{1.5, 1.0});
    p.push_back({"logistic-power_q=1.5_eps=1e-2", lp, 1e-2});
    p.push_back({"logistic-power_q=1.5_eps=2e-3", lp, 2e-3});
    const Model df(PowerLogistic{2.0, 1.0}, QuadraticConvection{1.0});
    p.push_back({"degenerate-fisher_p=2_eps=1e-1", df, 1e-1});
    p.push_back({"degenerate-fisher_p=2_eps=1e-2", df, 1e-2});
    for (auto& x : p) {
        for (auto& ch : x.id) {
            if (ch == '|') ch = '_';
        }
    }
    return p;
}

struct FiguresCmd {
    std::string out_dir = "figures";
    double tol_c = 1e-6;

    int run() const {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        const auto opt = speed_options(tol_c);
        json summary = json::array();
        for (const auto& panel : figure_panels()) {
            json row{{"panel", panel.id}, {"epsilon", panel.eps}};
            try {
                const auto r = bifront::critical_speed(panel.model, panel.eps, opt);
                const bifront::FrontProblem p(panel.model, panel.eps, r.trajectory_at_c_star.speed);
                const auto prof = bifront::reconstruct(r.trajectory_at_c_star, p);
                write_file((fs::path(out_dir) / (panel.id + "_profile.csv")).string(), csv_of(prof));
                row["c_star"] = r.c_star;
                row["lower_bound"] = r.bounds.lower;
                row["upper_bound"] = r.bounds.upper;
                try {
                    const auto a = bifront::limit_analysis(panel.model);
                    std::ostringstream os;
                    bifront::io::write_csv(os, a.limit_profile, prof.z.front(), prof.z.back(), 2001);
                    write_file((fs::path(out_dir) / (panel.id + "_limit.csv")).string(), os.str());
                    row["c_bar"] = a.c_bar;
                    row["regime"] = to_string(a.regime.regime);
                } catch (const Error& e) {
                    row["limit_error"] = e.what();
                }
            } catch (const Error& e) {
                row["error"] = e.what();
            }
            summary.push_back(row);
        }
        write_file((fs::path(out_dir) / "summary.json").string(), summary.dump(2) + "\n");
        std::cout << summary.dump(2) << '\n';
        return 0;
    }
};

// --- verify ----------------------------------------------------------------

/// Recomputes each certified quantity through the library and compares.
json check_certification(const bifront::oracle::Certification& c) {
    using namespace bifront;
    auto fb = [](double a) { return Model(Logistic{1.0}, QuadraticConvection{a}); };
    std::optional<double> mine;
    // Quantities that go through the ODE integrator agree only to its accuracy.
    double tol = c.tolerance;
    const std::string& id = c.quantity_id;
    auto param = [&id](const std::string& key) {
        const std::string text = id.substr(id.find(key + "=") + key.size() + 1);
        const auto slash = text.find('/');
        if (slash == std::string::npos) {
            return std::stod(text);
        }
        return std::stod(text.substr(0, slash)) / std::stod(text.substr(slash + 1));
    };
    if (id == "F(1):fisher-burgers") {
        mine = fb(-0.5).F(1.0);
    } else if (id == "F(1):power-logistic-p2") {
        mine = Model(PowerLogistic{2.0, 1.0}, QuadraticConvection{1.0}).F(1.0);
    } else if (id.rfind("v_plus:", 0) == 0) {
        mine = find_v_plus(fb(param("alpha")));
    } else if (id == "sup_S:h=0") {
        mine = lower_bound(Model(Logistic{1.0}, ZeroConvection{}));
    } else if (id.rfind("sup_S:", 0) == 0) {
        mine = lower_bound(fb(param("alpha")));
    } else if (id.rfind("upper_bound:", 0) == 0) {
        mine = upper_bound(fb(-0.5), 2e-3);
    } else if (id.rfind("series_B:", 0) == 0) {
        mine = series_start_at_one(FrontProblem(fb(0.0), 1.0, 1.0), 1e-4).B;
    } else if (id.rfind("y_upper_bound:", 0) == 0) {
        mine = y_upper_bound(FrontProblem(fb(-0.5), 2e-3, 0.7), 0.5).value_or(std::nan(""));
    } else if (id.rfind("pure_convection:", 0) == 0) {
        const Model m(ZeroReaction{}, PolynomialConvection{{0.0, 0.0, 1.0, -1.0}});
        auto t = integrate_backward(FrontProblem(m, 0.01, 0.0));
        mine = t.y_at(0.5);
        tol = std::max(tol, 1e-8);
    } else if (id.rfind("rhs_y:", 0) == 0) {
        mine = rhs_y(FrontProblem(Model(Logistic{1.0}, ZeroConvection{}), 1.0, 1.0), 0.5, 2.0);
    } else if (id.rfind("inviscid:", 0) == 0) {
        const InviscidProfile vi(Model(PowerLogistic{2.0, 1.0}, QuadraticConvection{1.0}), 0.0, 0.0, 0.5);
        mine = vi.v_of(2.0);
    }
    json j = io::to_json(c);
    if (mine) {
        j["library_value"] = *mine;
        j["agrees"] = std::abs(*mine - c.value) <= tol;
        j["agreement_tolerance"] = tol;
    } else {
        j["library_value"] = nullptr;
        j["agrees"] = nullptr;
    }
    return j;
}

struct VerifyCmd {
    std::string output;

    int run() const {
        json list = json::array();
        bool all = true;
        for (const auto& c : bifront::oracle::certify()) {
            json j = check_certification(c);
            if (j["agrees"].is_boolean() && !j["agrees"].get<bool>()) {
                all = false;
            }
            list.push_back(j);
        }
        if (!output.empty()) {
            write_file(output, list.dump(2) + "\n");
        }
        std::cout << list.dump(2) << '\n';
        return all ? 0 : kExitSolver;
    }
};

int exit_code_for(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::MalformedModel:
    case ErrorKind::ConstraintViolation: return kExitValidation;
    case ErrorKind::InvalidInput:
    case ErrorKind::Domain: return kExitUsage;
    default: return kExitSolver;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Critical speeds and profiles of Born-Infeld reaction-convection fronts"};
    app.require_subcommand(1);

    CriticalSpeedCmd cs;
    auto* cs_app = app.add_subcommand("critical-speed", "smallest admissible speed for one eps");
    cs.model.attach(cs_app);
    cs_app->add_option("--eps", cs.eps, "diffusion strength")->required()->check(CLI::PositiveNumber);
    cs_app->add_option("--tol-c", cs.tol_c, "bisection tolerance")->check(CLI::PositiveNumber);
    cs_app->add_option("--with-profile", cs.profile_path, "write the critical profile as CSV z,v,dv");
    cs_app->add_option("--trajectory", cs.trajectory_path, "write y(v) as CSV v,y");
    cs_app->add_option("--format", cs.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

    ClassifyCmd cl;
    auto* cl_app = app.add_subcommand("classify", "regime, limit speed and limit profile");
    cl.model.attach(cl_app);
    cl_app->add_option("--limit-profile", cl.profile_path, "write the limit profile as CSV z,v,segment_tag");
    cl_app->add_option("--z-lo", cl.z_lo, "left end of the CSV window");
    cl_app->add_option("--z-hi", cl.z_hi, "right end of the CSV window");

    SweepCmd sw;
    auto* sw_app = app.add_subcommand("sweep", "critical speed and distance to the limit profile over eps");
    sw.model.attach(sw_app);
    sw_app->add_option("--eps-list", sw.eps_list, "decreasing eps values")->required()->delimiter(',')
        ->check(CLI::PositiveNumber);
    sw_app->add_option("--tol-c", sw.tol_c, "bisection tolerance")->check(CLI::PositiveNumber);
    sw_app->add_option("--z-lo", sw.z_lo, "left end of the comparison window");
    sw_app->add_option("--z-hi", sw.z_hi, "right end of the comparison window");
    sw_app->add_option("--output", sw.output, "CSV file (default: stdout)");

    FiguresCmd fg;
    auto* fg_app = app.add_subcommand("figures", "CSV data for the standard panels");
    fg_app->add_option("--output-dir", fg.out_dir, "output directory");
    fg_app->add_option("--tol-c", fg.tol_c, "bisection tolerance")->check(CLI::PositiveNumber);

    VerifyCmd vf;
    auto* vf_app = app.add_subcommand("verify", "run oracle certifications against the library");
    vf_app->add_option("--output", vf.output, "certification JSON file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*cs_app) return cs.run();
        if (*cl_app) return cl.run();
        if (*sw_app) return sw.run();
        if (*fg_app) return fg.run();
        if (*vf_app) return vf.run();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSolver;
    }
    return kExitUsage;
}
