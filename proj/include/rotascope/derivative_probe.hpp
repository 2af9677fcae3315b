#pragma once

// Difference quotients of t -> rho(f_t): towards plateaus of convergents of
// an irrational rotation number, and away from the boundary of a plateau.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rotascope/circle_map.hpp"
#include "rotascope/cont_frac.hpp"
#include "rotascope/denjoy.hpp"
#include "rotascope/errors.hpp"
#include "rotascope/rotation.hpp"
#include "rotascope/staircase.hpp"

namespace rotascope {

struct QuotientRecord {
    int k = 0;
    Rational convergent;
    double t_prime = 0.0;
    double quotient = 0.0;
    double uncertainty = 0.0;
    double bound_eM = 0.0;
    std::optional<double> bound_e55;
    std::optional<double> hat_ell;
    double running_max = 0.0;
    bool tie = false;           // |p/q - rho| within the enclosure radius
    bool skipped = false;
    std::string skip_reason;

    bool satisfies_eM() const { return skipped || quotient + uncertainty >= bound_eM; }
    bool satisfies_e55() const { return skipped || !bound_e55 || quotient + uncertainty >= *bound_e55; }
};

struct QuotientOptions {
    double rho_tol = 1e-12;
    double plateau_tol = 1e-13;
    std::int64_t qcap = 10'000;
    bool with_e55 = true;
};

inline std::vector<QuotientRecord> quotient_sequence(const LiftDescriptor& lift, double t0, int n_conv,
                                                     const QuotientOptions& opt = {}) {
    if (n_conv < 1) throw DomainError("quotient_sequence: n_conv must be >= 1");
    RotationEstimate rho = rotation_farey(FamilyPoint{lift, t0}, opt.rho_tol);
    if (rho.locked) throw PreconditionFailed("quotient_sequence: rho(t0) locked at " + rho.locked->str());
    ContinuedFraction cf = continued_fraction(rho.value, 64);
    const double eM = std::exp(-distortion_constants(lift).M);

    std::vector<QuotientRecord> out;
    double running = 0.0;
    for (int k = 0; k <= n_conv && static_cast<std::size_t>(k) < cf.convergents.size(); ++k) {
        const Rational pq = cf.convergents[static_cast<std::size_t>(k)];
        if (pq.q > opt.qcap) break;
        QuotientRecord r;
        r.k = k;
        r.convergent = pq;
        r.bound_eM = eM;
        const double gap = pq.value() - rho.value;
        r.tie = std::fabs(gap) <= rho.radius;
        try {
            Plateau pl = plateau_endpoints(lift, pq, opt.plateau_tol);
            // The plateau end facing t0 is on the side of the sign of p/q - rho(t0).
            r.t_prime = gap > 0.0 ? pl.t_left : pl.t_right;
            double dt = r.t_prime - t0;
            r.quotient = gap / dt;
            r.uncertainty = rho.radius / std::fabs(dt);
            if (!(r.quotient > 0.0))
                throw CombinatoricsViolation("plateau end on the wrong side of t0");
        } catch (const Error& e) {
            r.skipped = true;
            r.skip_reason = e.what();
            out.push_back(r);
            continue;
        }
        if (opt.with_e55 && k >= 1) {
            try {
                DenjoyOptions dop;
                dop.rho_tol = opt.rho_tol;
                dop.plateau_tol = opt.plateau_tol;
                HatEllCheck h = hat_ell_bound_check(lift, t0, 0.0, k, dop);
                r.bound_e55 = h.bound;
                r.hat_ell = h.hat_ell;
            } catch (const Error&) {
                // Combinatorics not certified at this depth: only the e^{-M} bound applies.
            }
        }
        running = std::max(running, r.quotient);
        r.running_max = running;
        out.push_back(r);
    }
    return out;
}

enum class Side { left, right };

inline const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }

struct BlowupProbe {
    Rational pq;
    Side side = Side::right;
    double t_boundary = 0.0;
    std::vector<double> offsets;
    std::vector<double> quotients;
    std::vector<double> uncertainties;
    double loglog_slope = 0.0;

    bool strictly_increasing() const {
        for (std::size_t i = 0; i + 1 < quotients.size(); ++i)
            if (!(quotients[i + 1] > quotients[i])) return false;
        return true;
    }
};

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double a = std::log(x[i]), b = std::log(y[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    double den = static_cast<double>(n) * sxx - sx * sx;
    return den == 0.0 ? 0.0 : (static_cast<double>(n) * sxy - sx * sy) / den;
}

struct BoundaryOptions {
    double plateau_tol = 1e-14;
    double rho_tol = 1e-13;
    std::int64_t qcap = 100'000'000;  // rho - p/q ~ delta for a rotation needs q ~ 1/delta
};

inline BlowupProbe rational_boundary_probe(const LiftDescriptor& lift, Rational pq, Side side,
                                           const std::vector<double>& deltas, const BoundaryOptions& opt = {}) {
    if (deltas.empty()) throw DomainError("rational_boundary_probe: empty offset list");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0)) throw DomainError("rational_boundary_probe: offsets must be positive");
        if (i > 0 && !(deltas[i] < deltas[i - 1]))
            throw DomainError("rational_boundary_probe: offsets must be strictly decreasing");
    }
    if (deltas.back() < 10.0 * opt.plateau_tol)
        throw Unresolvable("rational_boundary_probe: offset below 10x plateau tolerance");
    pq = Rational::make(pq.p, pq.q);
    Plateau pl = plateau_endpoints(lift, pq, opt.plateau_tol);
    BlowupProbe b;
    b.pq = pq;
    b.side = side;
    b.t_boundary = side == Side::right ? pl.t_right : pl.t_left;
    for (double d : deltas) {
        double t = side == Side::right ? b.t_boundary + d : b.t_boundary - d;
        FareyOptions fo;
        fo.tol = opt.rho_tol;
        fo.qcap = opt.qcap;
        RotationEstimate rho = rotation_farey(FamilyPoint{lift, t}, fo);
        double diff = std::fabs(rho.value - pq.value());
        if (!(diff > 10.0 * rho.radius))
            throw Unresolvable("rational_boundary_probe: rho(t) - p/q not resolved at offset " + std::to_string(d));
        b.offsets.push_back(d);
        b.quotients.push_back(diff / d);
        b.uncertainties.push_back(rho.radius / d);
    }
    b.loglog_slope = loglog_slope(b.offsets, b.quotients);
    return b;
}

}  // namespace rotascope
