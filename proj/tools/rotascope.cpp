// rotascope: command-line front end for the rotation-number toolkit.
//
// Exit codes: 0 success, 1 failed check or numerical failure, 2 usage error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rotascope/io.hpp"
#include "rotascope/verify.hpp"

namespace rs = rotascope;

namespace {

struct Common {
    std::string family = "arnold";
    double K = 0.5;
    std::vector<double> sin_coeffs;
    std::vector<double> cos_coeffs;
    std::string lift_json;
    int precision = 15;
    std::string format = "json";
    std::string plot;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--family", c.family, "identity | arnold | harmonic")
        ->check(CLI::IsMember({"identity", "arnold", "harmonic"}));
    app->add_option("--K", c.K, "standard-map coupling, |K| < 1");
    app->add_option("--sin", c.sin_coeffs, "sine coefficients c_1, c_2, ... (harmonic family)")->delimiter(',');
    app->add_option("--cos", c.cos_coeffs, "cosine coefficients d_1, d_2, ... (harmonic family)")->delimiter(',');
    app->add_option("--lift", c.lift_json, "lift as JSON text or a path to a JSON file");
    app->add_option("--precision", c.precision, "significant digits; above 16 selects double-double")
        ->check(CLI::Range(15, 32));
    app->add_option("--format", c.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--plot", c.plot, "write NAME.dat and NAME.gp");
}

rs::LiftDescriptor make_lift(const Common& c) {
    if (!c.lift_json.empty()) {
        std::string text = c.lift_json;
        if (text.find('{') == std::string::npos) {
            std::ifstream in(text);
            if (!in) throw rs::DomainError("--lift: cannot open " + text);
            std::stringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        rs::json j;
        try {
            j = rs::json::parse(text);
        } catch (const rs::json::exception& e) {
            throw rs::DomainError(std::string("--lift: ") + e.what());
        }
        if (!j.contains("precision")) j["precision"] = c.precision;
        return rs::lift_from_json(j);
    }
    if (c.family == "identity") return rs::LiftDescriptor::identity(c.precision);
    if (c.family == "arnold") return rs::LiftDescriptor::arnold(c.K, c.precision);
    return rs::LiftDescriptor::harmonic(c.sin_coeffs, c.cos_coeffs, "harmonic", c.precision);
}

// Flat JSON objects print as key,value CSV; anything else stays JSON.
void emit(const rs::json& j, const Common& c) {
    if (c.format == "csv" && j.is_object()) {
        std::cout << "key,value\n";
        for (const auto& [k, v] : j.items()) {
            if (v.is_structured()) std::cout << k << ",\"" << v.dump() << "\"\n";
            else if (v.is_string()) std::cout << k << ',' << v.get<std::string>() << '\n';
            else std::cout << k << ',' << v.dump() << '\n';
        }
        return;
    }
    std::cout << j.dump(2) << '\n';
}

void write_plot(const std::string& name, const std::vector<std::pair<double, double>>& pts, const std::string& xlabel,
                const std::string& ylabel, bool loglog, const std::string& style = "points pt 7 ps 0.4") {
    std::ofstream dat(name + ".dat");
    dat.precision(17);
    for (auto [x, y] : pts) dat << x << ' ' << y << '\n';
    std::ofstream gp(name + ".gp");
    gp << "set xlabel '" << xlabel << "'\nset ylabel '" << ylabel << "'\n";
    if (loglog) gp << "set logscale xy\n";
    gp << "set key off\nplot '" << name << ".dat' using 1:2 with " << style << "\n";
}

double parameter_for(const rs::LiftDescriptor& lift, std::optional<double> t, std::optional<double> alpha) {
    if (t) return *t;
    if (alpha) return rs::inverse_rho(lift, *alpha).t;
    return rs::inverse_rho(lift, rs::verify::golden()).t;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rotation numbers, mode-locking plateaus and their difference quotients"};
    app.require_subcommand(1);
    Common c;

    // cf
    auto* cf = app.add_subcommand("cf", "continued fraction and closest returns");
    double cf_alpha = 0.0;
    std::string cf_quadratic;
    int cf_terms = 40;
    std::int64_t cf_Q = 0;
    cf->add_option("--alpha", cf_alpha, "real number to expand");
    cf->add_option("--quadratic", cf_quadratic, "exact expansion: golden | sqrt2")->check(CLI::IsMember({"golden", "sqrt2"}));
    cf->add_option("--terms", cf_terms, "maximum partial quotients")->check(CLI::PositiveNumber);
    cf->add_option("--Q", cf_Q, "also list closest returns q <= Q");
    add_common(cf, c);

    // rho
    auto* rho = app.add_subcommand("rho", "rotation number of f_t");
    double rho_t = 0.0, rho_tol = 1e-10, rho_x0 = 0.0;
    std::string rho_method = "farey";
    std::int64_t rho_n = 100'000;
    rho->add_option("--t", rho_t, "family parameter")->required();
    rho->add_option("--method", rho_method, "farey | birkhoff")->check(CLI::IsMember({"farey", "birkhoff"}));
    rho->add_option("--tol", rho_tol, "Farey enclosure width")->check(CLI::PositiveNumber);
    rho->add_option("--n", rho_n, "Birkhoff iterations")->check(CLI::PositiveNumber);
    rho->add_option("--x0", rho_x0, "base point");
    add_common(rho, c);

    // plateau
    auto* plateau = app.add_subcommand("plateau", "mode-locking interval rho^{-1}(p/q)");
    std::int64_t pl_p = 0, pl_q = 1;
    double pl_tol = 1e-12;
    plateau->add_option("--p", pl_p)->required();
    plateau->add_option("--q", pl_q)->required()->check(CLI::PositiveNumber);
    plateau->add_option("--tol", pl_tol, "endpoint tolerance")->check(CLI::PositiveNumber);
    add_common(plateau, c);

    // inverse
    auto* inverse = app.add_subcommand("inverse", "parameter t with rho(f_t) = alpha");
    double inv_alpha = 0.0, inv_tol = 1e-12;
    inverse->add_option("--alpha", inv_alpha)->required();
    inverse->add_option("--tol", inv_tol)->check(CLI::PositiveNumber);
    add_common(inverse, c);

    // jd
    auto* jd = app.add_subcommand("jd", "measure of rho^{-1}(p/q +- q^-d) outside the plateau");
    std::int64_t jd_p = 1, jd_q = 2;
    double jd_d = 3.5, jd_tol = 1e-12;
    jd->add_option("--p", jd_p)->required();
    jd->add_option("--q", jd_q)->required()->check(CLI::PositiveNumber);
    jd->add_option("--d", jd_d, "exponent, > 3")->required();
    jd->add_option("--tol", jd_tol)->check(CLI::PositiveNumber);
    add_common(jd, c);

    // sweep
    auto* sw = app.add_subcommand("sweep", "devil's staircase samples");
    double sw_lo = -0.5, sw_hi = 0.5, sw_tol = 1e-10;
    int sw_samples = 500;
    sw->add_option("--t-lo", sw_lo);
    sw->add_option("--t-hi", sw_hi);
    sw->add_option("--samples", sw_samples)->check(CLI::Range(2, 10'000'000));
    sw->add_option("--tol", sw_tol)->check(CLI::PositiveNumber);
    add_common(sw, c);

    // denjoy
    auto* dj = app.add_subcommand("denjoy", "return-interval certificate at a convergent");
    std::optional<double> dj_t, dj_alpha;
    double dj_x = 0.0;
    int dj_n = 5, dj_samples = 16;
    dj->add_option("--t0", dj_t, "base parameter (default: inverse of --alpha)");
    dj->add_option("--alpha", dj_alpha, "rotation number defining t0 (default golden mean)");
    dj->add_option("--x", dj_x, "base point");
    dj->add_option("--n-index", dj_n, "convergent index n")->check(CLI::PositiveNumber);
    dj->add_option("--samples", dj_samples, "extra base points for max hat_ell")->check(CLI::NonNegativeNumber);
    add_common(dj, c);

    // conjugacy
    auto* cj = app.add_subcommand("conjugacy", "orbit-rank conjugacy and the integral of 1/h'");
    std::optional<double> cj_t, cj_alpha;
    std::int64_t cj_n = 8192;
    double cj_delta = 1e-5;
    cj->add_option("--t", cj_t, "parameter (default: inverse of --alpha)");
    cj->add_option("--alpha", cj_alpha, "rotation number defining t (default golden mean)");
    cj->add_option("--n", cj_n, "orbit length")->check(CLI::Range(2, 10'000'000));
    cj->add_option("--delta", cj_delta, "finite-difference step for comparison")->check(CLI::PositiveNumber);
    add_common(cj, c);

    // probe
    auto* probe = app.add_subcommand("probe", "difference-quotient probes");
    probe->require_subcommand(1);
    auto* pc = probe->add_subcommand("convergents", "quotients towards convergent plateaus");
    std::optional<double> pc_t, pc_alpha;
    int pc_n = 8;
    std::int64_t pc_qcap = 10'000;
    pc->add_option("--t0", pc_t, "base parameter (default: inverse of --alpha)");
    pc->add_option("--alpha", pc_alpha, "rotation number defining t0 (default golden mean)");
    pc->add_option("--n-conv", pc_n, "last convergent index")->check(CLI::PositiveNumber);
    pc->add_option("--qcap", pc_qcap, "largest denominator")->check(CLI::PositiveNumber);
    add_common(pc, c);
    auto* pb = probe->add_subcommand("boundary", "quotients leaving a plateau boundary");
    std::int64_t pb_p = 0, pb_q = 1;
    std::string pb_side = "right";
    std::vector<double> pb_deltas{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
    pb->add_option("--p", pb_p);
    pb->add_option("--q", pb_q)->check(CLI::PositiveNumber);
    pb->add_option("--side", pb_side)->check(CLI::IsMember({"left", "right"}));
    pb->add_option("--deltas", pb_deltas, "decreasing offsets")->delimiter(',');
    add_common(pb, c);

    // verify
    auto* vf = app.add_subcommand("verify", "run the acceptance suite");
    std::string vf_suite = "all";
    std::uint64_t vf_seed = 0;
    vf->add_option("--suite", vf_suite, "all or one check id");
    vf->add_option("--seed", vf_seed, "random seed");
    add_common(vf, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return e.get_exit_code() == 0 ? code : 2;
    }

    try {
        const rs::LiftDescriptor lift = make_lift(c);

        if (*cf) {
            rs::ContinuedFraction e = !cf_quadratic.empty()
                ? rs::continued_fraction(cf_quadratic == "golden" ? rs::QuadraticIrrational::golden()
                                                                  : rs::QuadraticIrrational::sqrt2_minus_1(),
                                         cf_terms)
                : rs::continued_fraction(cf_alpha, cf_terms);
            rs::json j = rs::to_json(e);
            if (cf_Q > 0) {
                double a = !cf_quadratic.empty() ? (cf_quadratic == "golden" ? rs::verify::golden() : std::sqrt(2.0) - 1.0)
                                                 : cf_alpha;
                rs::json cr = rs::json::array();
                for (const auto& r : rs::closest_returns(a, cf_Q)) cr.push_back({{"q", r.q}, {"p", r.p}, {"sign", r.sign}});
                j["closest_returns"] = cr;
            }
            if (c.format == "csv") {
                std::cout << "k,a,p,q\n";
                for (std::size_t k = 0; k < e.a.size(); ++k)
                    std::cout << k << ',' << e.a[k] << ',' << e.convergents[k].p << ',' << e.convergents[k].q << '\n';
            } else {
                emit(j, c);
            }
            return 0;
        }

        if (*rho) {
            rs::FamilyPoint fp{lift, rho_t};
            rs::RotationEstimate e = rho_method == "farey" ? rs::rotation_farey(fp, [&] {
                rs::FareyOptions o;
                o.tol = rho_tol;
                o.x0 = rho_x0;
                return o;
            }())
                                                          : rs::rotation_birkhoff(fp, rho_x0, rho_n);
            emit(rs::to_json(e), c);
            return 0;
        }

        if (*plateau) {
            rs::Plateau p = rs::plateau_endpoints(lift, rs::Rational::make(pl_p, pl_q), pl_tol);
            emit(rs::to_json(p), c);
            return 0;
        }

        if (*inverse) {
            rs::InverseOptions o;
            o.tol = inv_tol;
            emit(rs::to_json(rs::inverse_rho(lift, inv_alpha, o)), c);
            return 0;
        }

        if (*jd) {
            rs::JdMeasurement m = rs::measure_Jd(lift, rs::Rational::make(jd_p, jd_q), jd_d, jd_tol);
            emit(rs::to_json(m), c);
            return m.holds ? 0 : 1;
        }

        if (*sw) {
            rs::StaircaseSample s = rs::sweep(lift, sw_lo, sw_hi, sw_samples, sw_tol);
            auto bad = rs::monotonicity_violations(s);
            if (c.format == "csv") {
                rs::write_sweep_csv(std::cout, s);
            } else {
                rs::json rows = rs::json::array();
                for (const auto& r : s) rows.push_back({{"t", r.t}, {"rho", rs::to_json(r.rho)}});
                emit({{"lift", rs::lift_to_json(lift)}, {"samples", rows}, {"monotonicity_violations", bad.size()}}, c);
            }
            if (!c.plot.empty()) {
                std::vector<std::pair<double, double>> pts;
                for (const auto& r : s) pts.emplace_back(r.t, r.rho.value);
                write_plot(c.plot, pts, "t", "rho(t)", false);
            }
            return bad.empty() ? 0 : 1;
        }

        if (*dj) {
            double t0 = parameter_for(lift, dj_t, dj_alpha);
            rs::DenjoyOptions o;
            o.samples = dj_samples;
            rs::HatEllCheck h = rs::hat_ell_bound_check(lift, t0, dj_x, dj_n, o);
            const rs::DenjoyFrame& fr = h.partition.frame;
            rs::DistortionRatio dr = rs::distortion_ratio_check(fr.lift, fr.t0, h.partition.L, fr.conv.q);
            rs::json cert = rs::to_json(h);
            cert["checks"]["distortion_ratio"] = dr.holds;
            cert["distortion"] = rs::to_json(dr);
            rs::json j{{"lift", rs::lift_to_json(lift)}, {"t0", t0}, {"x", dj_x}, {"n_index", dj_n}, {"certificate", cert}};
            emit(j, c);
            return rs::certificate_passes(cert) ? 0 : 1;
        }

        if (*cj) {
            double t = parameter_for(lift, cj_t, cj_alpha);
            rs::FamilyPoint fp{lift, t};
            rs::ConjugacyEstimate e = rs::conjugacy_from_orbit(fp, cj_n);
            double integral = e.inverse_derivative_integral();
            double fd = rs::rho_difference_quotient(lift, t, cj_delta);
            rs::json j{{"t", t},
                       {"alpha", e.alpha},
                       {"n", cj_n},
                       {"residual", e.residual(fp)},
                       {"min_slope", e.min_slope()},
                       {"integral_inverse_derivative", integral},
                       {"difference_quotient", fd},
                       {"delta", cj_delta},
                       {"schwarz_ok", integral >= 1.0 - 1e-3}};
            emit(j, c);
            if (!c.plot.empty()) {
                std::vector<std::pair<double, double>> pts;
                for (std::size_t k = 0; k < e.size(); ++k) pts.emplace_back(e.theta[k], e.y[k] - e.theta[k]);
                write_plot(c.plot, pts, "theta", "h(theta) - theta", false, "lines");
            }
            return integral >= 1.0 - 1e-3 ? 0 : 1;
        }

        if (*pc) {
            double t0 = parameter_for(lift, pc_t, pc_alpha);
            rs::QuotientOptions o;
            o.qcap = pc_qcap;
            auto recs = rs::quotient_sequence(lift, t0, pc_n, o);
            bool ok = true;
            for (const auto& r : recs) ok = ok && r.satisfies_eM() && r.satisfies_e55();
            if (c.format == "csv") {
                std::cout << "k,p,q,t_prime,quotient,uncertainty,bound_eM,bound_e55\n";
                std::cout.precision(17);
                for (const auto& r : recs) {
                    if (r.skipped) continue;
                    std::cout << r.k << ',' << r.convergent.p << ',' << r.convergent.q << ',' << r.t_prime << ','
                              << r.quotient << ',' << r.uncertainty << ',' << r.bound_eM << ',';
                    if (r.bound_e55) std::cout << *r.bound_e55;
                    std::cout << '\n';
                }
            } else {
                rs::json arr = rs::json::array();
                for (const auto& r : recs) arr.push_back(rs::to_json(r));
                double last = recs.empty() ? 0.0 : recs.back().running_max;
                emit({{"t0", t0}, {"records", arr}, {"running_max", last}, {"all_bounds_hold", ok}}, c);
            }
            if (!c.plot.empty()) {
                std::vector<std::pair<double, double>> pts;
                for (const auto& r : recs)
                    if (!r.skipped) pts.emplace_back(static_cast<double>(r.convergent.q), r.quotient);
                write_plot(c.plot, pts, "q_k", "quotient", false, "linespoints pt 7");
            }
            return ok ? 0 : 1;
        }

        if (*pb) {
            rs::BlowupProbe b = rs::rational_boundary_probe(lift, rs::Rational::make(pb_p, pb_q),
                                                            pb_side == "left" ? rs::Side::left : rs::Side::right,
                                                            pb_deltas);
            if (c.format == "csv") {
                std::cout << "delta,quotient\n";
                std::cout.precision(17);
                for (std::size_t i = 0; i < b.offsets.size(); ++i) std::cout << b.offsets[i] << ',' << b.quotients[i] << '\n';
            } else {
                emit(rs::to_json(b), c);
            }
            if (!c.plot.empty()) {
                std::vector<std::pair<double, double>> pts;
                for (std::size_t i = 0; i < b.offsets.size(); ++i) pts.emplace_back(b.offsets[i], b.quotients[i]);
                write_plot(c.plot, pts, "delta", "quotient", true, "linespoints pt 7");
            }
            return 0;
        }

        if (*vf) {
            rs::VerifyReport rep = rs::run_verify(vf_suite, vf_seed);
            for (const auto& r : rep.checks)
                std::cerr << (r.status == "pass" ? "PASS " : r.status == "fail" ? "FAIL " : "SKIP ") << r.id << ": "
                          << r.detail << '\n';
            std::cout << rep.to_json().dump(2) << '\n';
            return rep.all_pass() ? 0 : 1;
        }
    } catch (const rs::DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
