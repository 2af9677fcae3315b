#pragma once

// Inverse problems on t -> rho(t) for the family f_t = f + t.
//
// Plateau endpoints: t -> F_t^q(x) is increasing with slope >= 1 for every x,
// hence so are G_max(t) = max_x (F_t^q(x) - x - p) and G_min(t) = min_x (...).
// rho(t) = p/q exactly when G_min(t) <= 0 <= G_max(t), so the left endpoint
// is the root of G_max and the right endpoint the root of G_min.  The slope
// bound also brackets each root in one step: G(t0 - G(t0)) and G(t0) have
// opposite signs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "rotascope/circle_map.hpp"
#include "rotascope/cont_frac.hpp"
#include "rotascope/errors.hpp"
#include "rotascope/rotation.hpp"

namespace rotascope {

struct Plateau {
    Rational pq;
    double t_left = 0.0;
    double t_right = 0.0;
    double tol = 0.0;
    bool verified = false;  // midpoint confirmed locked (vacuous for zero width)

    double width() const { return t_right - t_left; }
};

struct PlateauOptions {
    double tol = 1e-12;
    int grid = 1024;
    int refine = 3;
};

namespace detail {

template <class Real>
double plateau_extremum(const LiftDescriptor& lift, double t, const Rational& pq, bool want_max,
                        const PlateauOptions& opt) {
    FamilyPoint fp{lift, t};
    MediantTester<Real, FamilyPoint> tester(fp, 0.0, opt.grid, opt.refine, default_lock_qcap<Real>());
    return tester.extremum(pq, want_max);
}

// Root of an increasing function with slope >= 1; `nonpositive(v)` decides
// which side the value v belongs to.  Returns the final bracket.
template <class F, class Side>
std::pair<double, double> slope_one_root(F&& h, Side&& left_side, double t0, double tol) {
    double v = h(t0);
    double a, b;
    if (left_side(v)) {
        a = t0;
        b = t0 - v + tol;
        for (int i = 0; i < 64; ++i) {
            double vb = h(b);
            if (!left_side(vb)) break;
            a = b;
            b = b - vb + std::max(tol, std::fabs(vb));
        }
    } else {
        b = t0;
        a = t0 - v - tol;
        for (int i = 0; i < 64; ++i) {
            double va = h(a);
            if (left_side(va)) break;
            b = a;
            a = a - va - std::max(tol, std::fabs(va));
        }
    }
    while (b - a > tol) {
        double mid = a + (b - a) / 2.0;
        if (mid <= a || mid >= b) break;
        if (left_side(h(mid))) a = mid; else b = mid;
    }
    return {a, b};
}

template <class Real>
Plateau plateau(const LiftDescriptor& lift, const Rational& pq_in, const PlateauOptions& opt) {
    if (!(opt.tol > 0.0)) throw DomainError("plateau_endpoints: tol must be positive");
    Rational pq = Rational::make(pq_in.p, pq_in.q);
    auto gmax = [&](double t) { return plateau_extremum<Real>(lift, t, pq, true, opt); };
    auto gmin = [&](double t) { return plateau_extremum<Real>(lift, t, pq, false, opt); };
    const double t0 = pq.value();
    // G_max(t) < 0 strictly left of the plateau.
    auto [la, lb] = slope_one_root(gmax, [](double v) { return v < 0.0; }, t0, opt.tol);
    // G_min(t) <= 0 up to the right end.
    auto [ra, rb] = slope_one_root(gmin, [](double v) { return v <= 0.0; }, t0, opt.tol);

    Plateau out;
    out.pq = pq;
    out.tol = opt.tol;
    out.t_left = (la + lb) / 2.0;
    out.t_right = (ra + rb) / 2.0;
    if (out.t_right - out.t_left < 2.0 * opt.tol) {
        double mid = (out.t_left + out.t_right) / 2.0;
        out.t_left = out.t_right = mid;
        out.verified = true;
        return out;
    }
    FamilyPoint fp{lift, (out.t_left + out.t_right) / 2.0};
    MediantTester<Real, FamilyPoint> tester(fp, 0.0, opt.grid, opt.refine, default_lock_qcap<Real>());
    out.verified = tester.grid_test(pq) == Verdict::locked;
    return out;
}

}  // namespace detail

/// The interval rho^{-1}(p/q) in parameter space.
inline Plateau plateau_endpoints(const LiftDescriptor& lift, const Rational& pq,
                                 const PlateauOptions& opt = {}) {
    return with_arithmetic(lift.arithmetic(), [&](auto tag) {
        return detail::plateau<decltype(tag)>(lift, pq, opt);
    });
}

inline Plateau plateau_endpoints(const LiftDescriptor& lift, const Rational& pq, double tol) {
    PlateauOptions opt;
    opt.tol = tol;
    return plateau_endpoints(lift, pq, opt);
}

struct InverseResult {
    double t = 0.0;
    double lo = 0.0;  // rho(lo) < alpha certified
    double hi = 0.0;  // rho(hi) > alpha certified
    bool resolution_limited = false;  // comparison undecidable near t at the q-cap

    double uncertainty() const { return (hi - lo) / 2.0; }
};

struct InverseOptions {
    double tol = 1e-12;
    double max_zone = 1e-6;  // widest undecidable zone accepted before Unresolvable
    FareyOptions farey{};
};

namespace detail {

/// p/q with q <= 10^4 that alpha equals up to a few ulps, if any.
inline std::optional<Rational> rational_surrogate(double alpha) {
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(alpha));
    ContinuedFraction cf = continued_fraction(alpha, 64);
    for (const auto& c : cf.convergents) {
        if (c.q > 10'000) break;
        if (std::fabs(alpha - c.value()) <= slack) return c;
    }
    return std::nullopt;
}

}  // namespace detail

/// The parameter t with rho(t) = alpha, for alpha an irrational surrogate.
inline InverseResult inverse_rho(const LiftDescriptor& lift, double alpha, const InverseOptions& opt = {}) {
    if (!std::isfinite(alpha)) throw RangeError("inverse_rho: non-finite target");
    if (auto r = detail::rational_surrogate(alpha))
        throw RangeError("inverse_rho: target " + r->str() + " is a small-denominator rational; use plateau_endpoints");
    auto cmp = [&](double t) { return compare_rotation(FamilyPoint{lift, t}, alpha, opt.farey); };

    // |rho(t) - t| <= amplitude, so this brackets the solution.
    const double spread = lift.amplitude() + 1e-3;
    double a = alpha - spread, b = alpha + spread;
    for (int i = 0; i < 8 && cmp(a) >= 0; ++i) a -= spread;
    for (int i = 0; i < 8 && cmp(b) <= 0; ++i) b += spread;
    if (cmp(a) >= 0 || cmp(b) <= 0) throw Unresolvable("inverse_rho: could not bracket the target");

    InverseResult res;
    while (b - a > opt.tol) {
        double mid = a + (b - a) / 2.0;
        if (mid <= a || mid >= b) break;
        int c = cmp(mid);
        if (c < 0) { a = mid; continue; }
        if (c > 0) { b = mid; continue; }
        // Undecidable at mid: shrink [a, b] to the undecidable zone around it.
        res.resolution_limited = true;
        double u0 = a, u1 = mid;  // cmp(u0) < 0, cmp(u1) >= 0
        while (u1 - u0 > opt.tol) {
            double m = u0 + (u1 - u0) / 2.0;
            if (m <= u0 || m >= u1) break;
            if (cmp(m) < 0) u0 = m; else u1 = m;
        }
        double v0 = mid, v1 = b;  // cmp(v0) <= 0, cmp(v1) > 0
        while (v1 - v0 > opt.tol) {
            double m = v0 + (v1 - v0) / 2.0;
            if (m <= v0 || m >= v1) break;
            if (cmp(m) > 0) v1 = m; else v0 = m;
        }
        a = u0;
        b = v1;
        if (b - a > opt.max_zone)
            throw Unresolvable("inverse_rho: comparison undecidable on [" + std::to_string(a) + ", " +
                               std::to_string(b) + "] at the q-cap");
        break;
    }
    res.lo = a;
    res.hi = b;
    res.t = a + (b - a) / 2.0;
    return res;
}

struct JdMeasurement {
    Rational pq;
    double d = 0.0;
    double measure = 0.0;
    double bound = 0.0;        // 2 e^M q^{-d}
    double uncertainty = 0.0;  // solver resolution carried into measure
    double t_minus = 0.0;      // rho^{-1}(p/q - q^{-d})
    double t_plus = 0.0;       // rho^{-1}(p/q + q^{-d})
    Plateau plateau;
    double M = 0.0;
    bool holds = false;        // measure <= bound (within uncertainty)
};

/// Lebesgue measure of rho^{-1}((p/q - q^{-d}, p/q + q^{-d})) minus the plateau of p/q.
inline JdMeasurement measure_Jd(const LiftDescriptor& lift, const Rational& pq_in, double d, double tol = 1e-12) {
    Rational pq = Rational::make(pq_in.p, pq_in.q);
    if (pq.q <= 1 || !(d > 3.0)) throw DomainError("measure_Jd requires q > 1 and d > 3");
    JdMeasurement m;
    m.pq = pq;
    m.d = d;
    const double qd = static_cast<double>(pq.q);
    const double eps = std::pow(qd, -d);
    InverseOptions iopt;
    iopt.tol = tol;
    // Endpoint of the open preimage: inner plateau edge for a rational target, else rho^{-1}.
    auto endpoint = [&](double alpha, bool lower, double& unc) {
        if (auto r = detail::rational_surrogate(alpha)) {
            Plateau pl = plateau_endpoints(lift, *r, tol);
            unc = tol;
            return lower ? pl.t_right : pl.t_left;
        }
        InverseResult res = inverse_rho(lift, alpha, iopt);
        unc = res.uncertainty();
        return res.t;
    };
    double u_lo = 0.0, u_hi = 0.0;
    m.t_minus = endpoint(pq.value() - eps, true, u_lo);
    m.t_plus = endpoint(pq.value() + eps, false, u_hi);
    m.plateau = plateau_endpoints(lift, pq, tol);
    m.measure = std::max(0.0, (m.t_plus - m.t_minus) - m.plateau.width());
    m.uncertainty = u_lo + u_hi + 2.0 * tol;
    m.M = distortion_constants(lift).M;
    m.bound = 2.0 * std::exp(m.M) * eps;
    m.holds = m.measure <= m.bound + m.uncertainty;
    return m;
}

struct StaircaseRow {
    double t;
    RotationEstimate rho;
};

using StaircaseSample = std::vector<StaircaseRow>;

/// Uniform grid of Farey estimates, evaluated concurrently, ordered by t.
inline StaircaseSample sweep(const LiftDescriptor& lift, double t_lo, double t_hi, int samples,
                             const FareyOptions& opt = {}) {
    if (!(t_lo < t_hi) || samples < 2) throw DomainError("sweep requires t_lo < t_hi and samples >= 2");
    StaircaseSample out(static_cast<std::size_t>(samples));
    const double step = (t_hi - t_lo) / (samples - 1);
    auto work = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            double t = (i == samples - 1) ? t_hi : t_lo + step * i;
            out[static_cast<std::size_t>(i)] = {t, rotation_farey(FamilyPoint{lift, t}, opt)};
        }
    };
    const int workers = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, samples);
    std::vector<std::future<void>> jobs;
    const int chunk = (samples + workers - 1) / workers;
    for (int w = 1; w < workers; ++w) {
        int b = w * chunk, e = std::min(samples, b + chunk);
        if (b < e) jobs.push_back(std::async(std::launch::async, work, b, e));
    }
    work(0, std::min(samples, chunk));
    for (auto& j : jobs) j.get();
    return out;
}

inline StaircaseSample sweep(const LiftDescriptor& lift, double t_lo, double t_hi, int samples, double tol) {
    FareyOptions opt;
    opt.tol = tol;
    return sweep(lift, t_lo, t_hi, samples, opt);
}

/// Pairs (i, j), i < j, with rho(t_i) above rho(t_j) beyond both radii.
inline std::vector<std::pair<std::size_t, std::size_t>> monotonicity_violations(const StaircaseSample& s,
                                                                                double slack = 1e-12) {
    std::vector<std::pair<std::size_t, std::size_t>> bad;
    double running_lo = -INFINITY;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (running_lo > s[j].rho.hi() + slack) bad.emplace_back(arg, j);
        if (s[j].rho.lo() > running_lo) {
            running_lo = s[j].rho.lo();
            arg = j;
        }
    }
    return bad;
}

inline void write_sweep_csv(std::ostream& os, const StaircaseSample& s) {
    os << "t,rho,radius,locked_p,locked_q\n";
    os.precision(17);
    for (const auto& row : s) {
        os << row.t << ',' << row.rho.value << ',' << row.rho.radius << ',';
        if (row.rho.locked) os << row.rho.locked->p << ',' << row.rho.locked->q;
        else os << ',';
        os << '\n';
    }
}

/// [rho(-1/2), rho(1/2)]: the family's actual rotation range over J.
inline std::pair<RotationEstimate, RotationEstimate> rotation_range(const LiftDescriptor& lift, double tol = 1e-8) {
    return {rotation_farey(FamilyPoint{lift, -0.5}, tol), rotation_farey(FamilyPoint{lift, 0.5}, tol)};
}

}  // namespace rotascope
