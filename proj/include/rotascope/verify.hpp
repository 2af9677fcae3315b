#pragma once

// The acceptance suite behind `rotascope verify`: ten checks, each with an
// observed value, the bound it is held to, and its runtime.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "rotascope/denjoy.hpp"
#include "rotascope/derivative_probe.hpp"
#include "rotascope/io.hpp"
#include "rotascope/measure_conj.hpp"
#include "rotascope/staircase.hpp"

namespace rotascope {

struct CheckResult {
    std::string id;
    std::string ref;
    std::string status = "skip";  // pass | fail | skip
    double observed = 0.0;
    double bound = 0.0;
    double tol = 0.0;
    double seconds = 0.0;
    std::string detail;  // human-readable, not part of the JSON report
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status != "fail"; });
    }

    json to_json() const {
        json arr = json::array();
        for (const auto& c : checks)
            arr.push_back({{"id", c.id},           {"ref", c.ref},     {"status", c.status},
                           {"observed", c.observed}, {"bound", c.bound}, {"tol", c.tol},
                           {"seconds", c.seconds}});
        return {{"checks", arr}};
    }
};

namespace verify {

inline double golden() { return (std::sqrt(5.0) - 1.0) / 2.0; }

/// M for the standard map, from its closed form 2 pi K / sqrt(1 - K^2).
inline double arnold_M(double K) { return 2.0 * std::numbers::pi * K / std::sqrt(1.0 - K * K); }

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Context {
    std::uint64_t seed = 0;
    double golden_t = NAN;  // inverse_rho(golden) for arnold K = 0.5, computed once

    double golden_parameter() {
        if (std::isnan(golden_t)) golden_t = inverse_rho(LiftDescriptor::arnold(0.5), golden()).t;
        return golden_t;
    }
};

inline void prop_lower_bound(Context& ctx, CheckResult& r) {
    const auto lift = LiftDescriptor::arnold(0.5);
    QuotientOptions opt;
    opt.qcap = 21;
    opt.with_e55 = false;
    auto recs = quotient_sequence(lift, ctx.golden_parameter(), 16, opt);
    r.bound = std::exp(-arnold_M(0.5));
    r.observed = INFINITY;
    int violations = 0, used = 0;
    for (const auto& q : recs) {
        if (q.skipped) continue;
        ++used;
        r.observed = std::min(r.observed, q.quotient + q.uncertainty);
        if (q.quotient + q.uncertainty < r.bound) ++violations;
    }
    r.status = (violations == 0 && used > 0) ? "pass" : "fail";
    r.detail = std::to_string(used) + " convergents, " + std::to_string(violations) + " violations";
}

inline void refined_bound(Context& ctx, CheckResult& r) {
    const auto lift = LiftDescriptor::arnold(0.5);
    QuotientOptions opt;
    opt.qcap = 21;
    auto recs = quotient_sequence(lift, ctx.golden_parameter(), 16, opt);
    r.bound = 1.0;
    r.observed = INFINITY;
    int certified = 0, violations = 0;
    double max_hat = 0.0;
    for (const auto& q : recs) {
        if (q.skipped || !q.bound_e55) continue;
        ++certified;
        max_hat = std::max(max_hat, *q.hat_ell);
        double ratio = (q.quotient + q.uncertainty) / *q.bound_e55;
        r.observed = std::min(r.observed, ratio);
        if (ratio < 1.0 || !(*q.hat_ell < 1.0)) ++violations;
    }
    r.status = (certified > 0 && violations == 0) ? "pass" : "fail";
    r.detail = std::to_string(certified) + " certified convergents, max hat_ell " + fmt(max_hat) +
               ", observed = min (quotient + uncertainty) / e^{-M hat_ell}";
}

inline void jd_measure(Context&, CheckResult& r) {
    const std::vector<std::pair<std::int64_t, double>> cases{{2, 3.5}, {3, 3.5}, {5, 3.5}, {5, 4.0}};
    r.bound = 1.0;
    r.tol = 1e-10;
    r.observed = 0.0;
    int violations = 0;
    for (double K : {0.5, 0.9}) {
        const auto lift = LiftDescriptor::arnold(K);
        for (auto [q, d] : cases) {
            JdMeasurement m = measure_Jd(lift, {1, q}, d);
            double closed = 2.0 * std::exp(arnold_M(K)) * std::pow(static_cast<double>(q), -d);
            r.observed = std::max(r.observed, m.measure / closed);
            if (m.measure > closed + m.uncertainty) ++violations;
        }
    }
    double id_err = 0.0;
    for (auto [q, d] : cases) {
        JdMeasurement m = measure_Jd(LiftDescriptor::identity(), {1, q}, d);
        id_err = std::max(id_err, std::fabs(m.measure - 2.0 * std::pow(static_cast<double>(q), -d)));
    }
    r.status = (violations == 0 && id_err <= r.tol) ? "pass" : "fail";
    r.detail = "max measure/bound " + fmt(r.observed) + ", identity error " + fmt(id_err);
}

inline void invariant_measure(Context& ctx, CheckResult& r) {
    const FamilyPoint fp{LiftDescriptor::arnold(0.5), ctx.golden_parameter()};
    const std::int64_t n = 200'000;
    double log_avg = std::fabs(birkhoff_average(fp, Observable::log_fprime(), 0.0, n).value);
    double min_deriv = INFINITY;
    for (int i = 1; i <= 5; ++i)
        for (int j = 0; j <= 5; ++j)
            min_deriv = std::min(min_deriv, birkhoff_average(fp, Observable::iter_deriv(i, j), 0.0, n).value);
    r.bound = 1e-3;
    r.observed = std::max(log_avg, 1.0 - min_deriv);
    r.status = r.observed <= r.bound ? "pass" : "fail";
    r.detail = "|mu(log f')| " + fmt(log_avg) + ", min mu((f^i)' o f^j) " + fmt(min_deriv);
}

inline void derivative_identity(Context& ctx, CheckResult& r) {
    const auto lift = LiftDescriptor::arnold(0.5);
    const double t = ctx.golden_parameter();
    ConjugacyEstimate c = conjugacy_from_orbit(FamilyPoint{lift, t}, 8192);
    double integral = c.inverse_derivative_integral();
    double fd = rho_difference_quotient(lift, t, 1e-5);
    r.bound = 0.1;
    r.tol = 1e-3;
    r.observed = std::fabs(integral - fd) / std::fabs(fd);
    r.status = (r.observed <= r.bound && integral >= 1.0 - r.tol) ? "pass" : "fail";
    r.detail = "integral of 1/h' " + fmt(integral) + ", difference quotient " + fmt(fd);
}

inline void parameter_derivative(Context&, CheckResult& r) {
    BrunovskyResult a = brunovsky_check(rotation_path(), golden(), 1e-4);
    BrunovskyResult b = brunovsky_check(perturbed_rotation_path(0.01), 0.3, 1e-5);
    const double closed = 1.0 + 0.02 * std::numbers::pi * std::cos(0.6 * std::numbers::pi);
    r.bound = 1e-3;
    r.observed = std::max({a.gap, b.gap, std::fabs(b.lhs - closed), std::fabs(b.rhs - closed)});
    r.status = r.observed <= r.bound ? "pass" : "fail";
    r.detail = "rotation gap " + fmt(a.gap) + ", perturbed gap " + fmt(b.gap) + " (closed form " + fmt(closed) + ")";
}

inline void boundary_blowup(Context&, CheckResult& r) {
    BlowupProbe b = rational_boundary_probe(LiftDescriptor::arnold(0.5), {0, 1}, Side::right,
                                            {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7});
    BlowupProbe id = rational_boundary_probe(LiftDescriptor::identity(), {1, 2}, Side::right, {1e-2, 1e-4, 1e-6});
    bool flat = true;
    for (std::size_t i = 0; i < id.quotients.size(); ++i)
        flat = flat && std::fabs(id.quotients[i] - 1.0) <= id.uncertainties[i] + 1e-9;
    r.bound = 10.0;
    r.observed = b.quotients.back() / b.quotients.front();
    r.status = (b.strictly_increasing() && r.observed >= r.bound && flat) ? "pass" : "fail";
    r.detail = "log-log slope " + fmt(b.loglog_slope) + (flat ? ", identity flat" : ", identity NOT flat");
}

inline void combinatorics(Context& ctx, CheckResult& r) {
    const auto lift = LiftDescriptor::arnold(0.5);
    const double t = ctx.golden_parameter();
    std::mt19937_64 rng(ctx.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    r.bound = 1e-12;
    r.observed = INFINITY;
    int failures = 0;
    double worst_ratio = 0.0;
    for (int n_index : {5, 6}) {  // q_n = 8 and 13, both orientations
        for (int s = 0; s < 20; ++s) {
            double x = U(rng);
            try {
                ReturnPartition rp = return_partition(lift, t, x, n_index);
                double m = std::min({rp.margin_L_disjoint, rp.margin_K_disjoint, rp.margin_run_in_K});
                r.observed = std::min(r.observed, m);
                if (!(m > r.bound) || rp.abut_K_error > r.bound) ++failures;
                // Distortion on L(x) over q_n disjoint iterates, in the partition's own frame.
                const DenjoyFrame& fr = rp.frame;
                DistortionRatio dr = distortion_ratio_check(fr.lift, fr.t0, rp.L, fr.conv.q);
                worst_ratio = std::max(worst_ratio, dr.max_ratio / dr.bound);
                if (!dr.holds) ++failures;
            } catch (const Error&) {
                ++failures;
            }
        }
    }
    r.status = failures == 0 ? "pass" : "fail";
    r.detail = "min margin " + fmt(r.observed) + ", max ratio/bound " + fmt(worst_ratio) + ", failures " +
               std::to_string(failures);
}

inline void oracle_equivalence(Context& ctx, CheckResult& r) {
    std::mt19937_64 rng(ctx.seed + 1);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int bad_rho = 0, bad_cr = 0;
    double worst = 0.0;
    const std::int64_t n = 10'000;
    for (int s = 0; s < 100; ++s) {
        double K = 0.95 * U(rng), t = U(rng) - 0.5;
        FamilyPoint fp{LiftDescriptor::arnold(K), t};
        RotationEstimate f = rotation_farey(fp, 1e-10);
        RotationEstimate b = rotation_birkhoff(fp, 0.0, n);
        double excess = std::fabs(f.value - b.value) - (f.radius + b.radius);
        worst = std::max(worst, excess);
        if (excess > 0.0) ++bad_rho;
    }
    for (int s = 0; s < 100; ++s) {
        double alpha = U(rng);
        if (detail::closest_returns_direct(alpha, 10'000) != detail::closest_returns_convergent(alpha, 10'000))
            ++bad_cr;
    }
    double plateau_err = 0.0;
    for (double K : {0.3, 0.5, 0.9}) {
        Plateau p = plateau_endpoints(LiftDescriptor::arnold(K), {0, 1});
        double w = K / (2.0 * std::numbers::pi);
        plateau_err = std::max({plateau_err, std::fabs(p.t_left + w), std::fabs(p.t_right - w)});
    }
    r.bound = 1e-9;
    r.observed = plateau_err;
    r.status = (bad_rho == 0 && bad_cr == 0 && plateau_err <= r.bound) ? "pass" : "fail";
    r.detail = "rho disagreements " + std::to_string(bad_rho) + " (worst excess " + fmt(worst) +
               "), closest-return mismatches " + std::to_string(bad_cr) + ", plateau error " + fmt(plateau_err);
}

inline void staircase_monotone(Context&, CheckResult& r) {
    StaircaseSample s = sweep(LiftDescriptor::arnold(0.9), -0.5, 0.5, 500, 1e-10);
    auto bad = monotonicity_violations(s);
    r.bound = 0.0;
    r.observed = static_cast<double>(bad.size());
    r.status = bad.empty() ? "pass" : "fail";
    r.detail = std::to_string(s.size()) + " samples";
}

struct CheckSpec {
    std::string id;
    std::string ref;
    double time_limit;  // seconds
    std::function<void(Context&, CheckResult&)> run;
};

inline const std::vector<CheckSpec>& checks() {
    static const std::vector<CheckSpec> all{
        {"prop21", "difference quotient >= e^-M towards convergent plateaus", 120, prop_lower_bound},
        {"e55", "refined bound e^-(M hat_ell) from the return-interval union", 300, refined_bound},
        {"jd", "measure of J_d(p/q) <= 2 e^M q^-d", 300, jd_measure},
        {"lemma22", "invariant-measure averages of log f' and (f^i)' o f^j", 60, invariant_measure},
        {"derivative", "rho' as the integral of 1/h', Schwarz lower bound", 120, derivative_identity},
        {"brunovsky", "parameter derivative of rotation number along rotation paths", 30, parameter_derivative},
        {"boundary", "difference-quotient growth at a plateau boundary", 180, boundary_blowup},
        {"combinatorics", "disjointness and containment of return intervals, distortion", 120, combinatorics},
        {"oracles", "estimator, closest-return and plateau oracle agreement", 180, oracle_equivalence},
        {"monotone", "staircase monotonicity", 180, staircase_monotone},
    };
    return all;
}

}  // namespace verify

/// Runs the named suite: "all" or a single check id.
inline VerifyReport run_verify(const std::string& suite, std::uint64_t seed = 0) {
    verify::Context ctx;
    ctx.seed = seed;
    VerifyReport report;
    bool matched = false;
    for (const auto& spec : verify::checks()) {
        if (suite != "all" && suite != spec.id) continue;
        matched = true;
        CheckResult r;
        r.id = spec.id;
        r.ref = spec.ref;
        auto start = std::chrono::steady_clock::now();
        try {
            spec.run(ctx, r);
        } catch (const std::exception& e) {
            r.status = "fail";
            r.detail = std::string("error: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (r.seconds > spec.time_limit) {
            r.status = "fail";
            r.detail += " (over time limit " + verify::fmt(spec.time_limit) + " s)";
        }
        report.checks.push_back(std::move(r));
    }
    if (!matched) throw DomainError("verify: unknown suite '" + suite + "'");
    return report;
}

}  // namespace rotascope
