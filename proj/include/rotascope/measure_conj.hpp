#pragma once

// Averages against the invariant measure, the orbit-rank conjugacy to the
// rotation, and the derivative identities built on it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "rotascope/circle_map.hpp"
#include "rotascope/errors.hpp"
#include "rotascope/rotation.hpp"

namespace rotascope {

/// Function on the circle sampled along an orbit.
struct Observable {
    enum class Kind { log_fprime, iter_deriv, displacement, custom };

    Kind kind = Kind::log_fprime;
    int i = 0;               // iter_deriv: (f^i)' o f^j
    int j = 0;
    Rational pq;             // displacement: x - (f^q(x) - p)
    std::function<double(double)> fn;  // custom, evaluated on [0,1)
    std::string tag = "log_fprime";

    static Observable log_fprime() { return {}; }

    static Observable iter_deriv(int i, int j) {
        if (i < 0 || j < 0) throw DomainError("iter_deriv: i, j must be >= 0");
        Observable o;
        o.kind = Kind::iter_deriv;
        o.i = i;
        o.j = j;
        o.tag = "iter_deriv(" + std::to_string(i) + "," + std::to_string(j) + ")";
        return o;
    }

    /// Id - f^q with the lift of f^q shifted by p; averages to p - q rho.
    static Observable displacement(Rational pq) {
        if (pq.q < 1) throw DomainError("displacement: q must be >= 1");
        Observable o;
        o.kind = Kind::displacement;
        o.pq = pq;
        o.tag = "id_minus_f^" + std::to_string(pq.q);
        return o;
    }

    static Observable custom(std::string tag, std::function<double(double)> fn) {
        Observable o;
        o.kind = Kind::custom;
        o.fn = std::move(fn);
        o.tag = std::move(tag);
        return o;
    }

    /// Number of orbit points beyond x_k that evaluating at x_k needs.
    std::int64_t lookahead() const {
        switch (kind) {
            case Kind::iter_deriv: return i + j;
            case Kind::displacement: return pq.q;
            default: return 0;
        }
    }
};

struct InvariantAverage {
    double value = 0.0;
    std::int64_t n = 0;
    std::string observable_tag;
    double x0 = 0.0;
};

namespace detail {

// Orbit f_t^k(x0) = x[k] + shift[k] with x[k] in [0,1), and f'(x_k).
struct SampledOrbit {
    std::vector<double> x;
    std::vector<std::int64_t> shift;
    std::vector<double> d;
};

inline SampledOrbit sample_orbit(const FamilyPoint& fp, double x0, std::int64_t len) {
    if (len > kDefaultIterationCap) throw CapExceeded("birkhoff_average: orbit length exceeds cap");
    SampledOrbit o;
    o.x.resize(static_cast<std::size_t>(len));
    o.shift.resize(static_cast<std::size_t>(len));
    o.d.resize(static_cast<std::size_t>(len));
    double fl = std::floor(x0);
    double y = x0 - fl;
    auto shift = static_cast<std::int64_t>(fl);
    for (std::int64_t k = 0; k < len; ++k) {
        o.x[static_cast<std::size_t>(k)] = y;
        o.shift[static_cast<std::size_t>(k)] = shift;
        o.d[static_cast<std::size_t>(k)] = fp.deriv(y);
        y = fp.value(y);
        fl = std::floor(y);
        y -= fl;
        shift += static_cast<std::int64_t>(fl);
    }
    return o;
}

inline double observe(const Observable& obs, const SampledOrbit& o, std::size_t k) {
    switch (obs.kind) {
        case Observable::Kind::log_fprime:
            return std::log(o.d[k]);
        case Observable::Kind::iter_deriv: {
            double prod = 1.0;
            for (int m = 0; m < obs.i; ++m) prod *= o.d[k + static_cast<std::size_t>(obs.j + m)];
            return prod;
        }
        case Observable::Kind::displacement: {
            std::size_t m = k + static_cast<std::size_t>(obs.pq.q);
            return (o.x[k] - o.x[m]) + static_cast<double>(o.shift[k] - o.shift[m] + obs.pq.p);
        }
        case Observable::Kind::custom:
            return obs.fn(o.x[k]);
    }
    return 0.0;
}

}  // namespace detail

/// (1/n) sum_{k<n} phi(f_t^k x0).
inline InvariantAverage birkhoff_average(const FamilyPoint& fp, const Observable& obs, double x0, std::int64_t n) {
    if (n < 1) throw DomainError("birkhoff_average: n must be >= 1");
    detail::SampledOrbit o = detail::sample_orbit(fp, x0, n + obs.lookahead() + 1);
    // Kahan summation keeps the 1e-3 level checks free of accumulation error.
    double sum = 0.0, comp = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
        double v = detail::observe(obs, o, static_cast<std::size_t>(k)) - comp;
        double s = sum + v;
        comp = (s - sum) - v;
        sum = s;
    }
    return {sum / static_cast<double>(n), n, obs.tag, x0};
}

/// Piecewise-linear degree-one map h with h(theta_j) = y_j, from one orbit.
struct ConjugacyEstimate {
    double alpha = 0.0;
    double alpha_radius = 0.0;
    double x0 = 0.0;
    std::vector<double> theta;  // sorted, in [0,1), theta[0] = 0
    std::vector<double> y;      // increasing, y.back() < y[0] + 1

    std::size_t size() const { return theta.size(); }

    /// h(theta), extended by h(theta + 1) = h(theta) + 1.
    double h(double th) const { return interp(theta, y, th); }

    /// h^{-1}(x), extended the same way.
    double h_inv(double x) const { return interp(y, theta, x); }

    /// 1/h' integrated over the circle: sum of dtheta^2/dy over knot gaps.
    double inverse_derivative_integral() const {
        double s = 0.0;
        for (std::size_t k = 0; k < theta.size(); ++k) {
            auto [dt, dy] = gap(k);
            s += dt * dt / dy;
        }
        return s;
    }

    /// max over knot-gap midpoints of |h(theta + alpha) - f_t(h(theta))|.
    double residual(const FamilyPoint& fp) const {
        double r = 0.0;
        for (std::size_t k = 0; k < theta.size(); ++k) {
            double th = theta[k] + 0.5 * gap(k).first;
            r = std::max(r, std::fabs(h(th + alpha) - fp.value(h(th))));
        }
        return r;
    }

    /// min over gaps of dy/dtheta; positive iff h is strictly increasing.
    double min_slope() const {
        double m = INFINITY;
        for (std::size_t k = 0; k < theta.size(); ++k) {
            auto [dt, dy] = gap(k);
            m = std::min(m, dy / dt);
        }
        return m;
    }

private:
    std::pair<double, double> gap(std::size_t k) const {
        if (k + 1 < theta.size()) return {theta[k + 1] - theta[k], y[k + 1] - y[k]};
        return {theta[0] + 1.0 - theta[k], y[0] + 1.0 - y[k]};
    }

    // Periodic piecewise-linear interpolation: u -> v with v(u + 1) = v(u) + 1.
    static double interp(const std::vector<double>& u, const std::vector<double>& v, double s) {
        const double base = u[0];
        double shift = std::floor(s - base);
        double r = s - shift;  // in [base, base + 1)
        auto it = std::upper_bound(u.begin(), u.end(), r);
        if (it == u.begin()) ++it;
        std::size_t k = static_cast<std::size_t>(it - u.begin()) - 1;
        double u0 = u[k], v0 = v[k];
        double u1 = k + 1 < u.size() ? u[k + 1] : u[0] + 1.0;
        double v1 = k + 1 < u.size() ? v[k + 1] : v[0] + 1.0;
        return v0 + (v1 - v0) * (r - u0) / (u1 - u0) + shift;
    }
};

/// Matches the orbit f_t^j(x0), j < n, with the rotation orbit j alpha for a given alpha.
inline ConjugacyEstimate conjugacy_for_alpha(const FamilyPoint& fp, std::int64_t n, double alpha,
                                             double alpha_radius = 0.0, double x0 = 0.0) {
    if (n < 2) throw DomainError("conjugacy_from_orbit: n must be >= 2");
    ConjugacyEstimate c;
    c.alpha = alpha;
    c.alpha_radius = alpha_radius;
    c.x0 = x0;
    struct Knot { double theta, y; };
    std::vector<Knot> knots(static_cast<std::size_t>(n));
    // f_t^j(x0) = y + shift, kept split so the knots do not lose digits as j grows.
    double y = x0;
    std::int64_t shift = 0;
    for (std::int64_t j = 0; j < n; ++j) {
        double ja = static_cast<double>(j) * alpha;
        double fl = std::floor(ja);
        knots[static_cast<std::size_t>(j)] = {ja - fl, y + static_cast<double>(shift - static_cast<std::int64_t>(fl))};
        y = fp.value(y);
        double yf = std::floor(y);
        y -= yf;
        shift += static_cast<std::int64_t>(yf);
    }
    std::sort(knots.begin(), knots.end(), [](const Knot& a, const Knot& b) { return a.theta < b.theta; });
    for (const auto& k : knots) {
        c.theta.push_back(k.theta);
        c.y.push_back(k.y);
    }
    for (std::size_t k = 0; k + 1 < c.y.size(); ++k)
        if (!(c.y[k + 1] > c.y[k]) || !(c.theta[k + 1] > c.theta[k]))
            throw OrderMismatch("conjugacy_from_orbit: orbit order differs from rotation order at rank " +
                                std::to_string(k));
    if (!(c.y.back() < c.y.front() + 1.0))
        throw OrderMismatch("conjugacy_from_orbit: orbit order differs from rotation order at wrap");
    return c;
}

/// As conjugacy_for_alpha, with alpha from a Farey enclosure of rho(f_t).
inline ConjugacyEstimate conjugacy_from_orbit(const FamilyPoint& fp, std::int64_t n, double x0 = 0.0,
                                              double rho_tol = 1e-12) {
    RotationEstimate rho = rotation_farey(fp, rho_tol);
    if (rho.locked) throw PreconditionFailed("conjugacy_from_orbit: rotation number locked at " + rho.locked->str());
    return conjugacy_for_alpha(fp, n, rho.value, rho.radius, x0);
}

/// rho'(t) as the integral of 1/h' for the piecewise-linear conjugacy.
inline double derivative_via_conjugacy(const LiftDescriptor& lift, double t, std::int64_t n,
                                       double schwarz_tol = 1e-3) {
    ConjugacyEstimate c = conjugacy_from_orbit(FamilyPoint{lift, t}, n);
    double v = c.inverse_derivative_integral();
    if (v < 1.0 - schwarz_tol)
        throw PreconditionFailed("derivative_via_conjugacy: integral " + std::to_string(v) + " below 1");
    return v;
}

/// Symmetric difference quotient of t -> rho(f_t).
inline double rho_difference_quotient(const LiftDescriptor& lift, double t, double delta, double tol = 1e-12) {
    double hi = rotation_farey(FamilyPoint{lift, t + delta}, tol).value;
    double lo = rotation_farey(FamilyPoint{lift, t - delta}, tol).value;
    return (hi - lo) / (2.0 * delta);
}

/// Path t -> g_t of lifts with the parameter derivative available.
struct LiftPath {
    std::string name;
    std::function<double(double, double)> value;  // g_t(x)
    std::function<double(double, double)> dt;     // d g_t(x) / dt
};

/// g_t = R_t.
inline LiftPath rotation_path() {
    return {"rotation", [](double x, double t) { return x + t; }, [](double, double) { return 1.0; }};
}

/// g_t = R_{t + eps sin 2 pi t}; rot(g_t) = t + eps sin 2 pi t.
inline LiftPath perturbed_rotation_path(double eps = 0.01) {
    const double tau = 2.0 * std::numbers::pi;
    return {"perturbed_rotation",
            [=](double x, double t) { return x + t + eps * std::sin(tau * t); },
            [=](double, double t) { return 1.0 + tau * eps * std::cos(tau * t); }};
}

/// g_t = hb o R_t o hb^{-1} with hb(x) = x + eps sin(2 pi x) / (2 pi).
inline LiftPath conjugated_rotation_path(double eps = 0.1) {
    if (!(std::fabs(eps) < 1.0)) throw DomainError("conjugated_rotation_path: |eps| must be < 1");
    const double tau = 2.0 * std::numbers::pi;
    auto hb = [=](double x) { return x + eps * std::sin(tau * x) / tau; };
    auto hb_inv = [=](double x) {
        double y = x;
        for (int it = 0; it < 60; ++it) {
            double step = (hb(y) - x) / (1.0 + eps * std::cos(tau * y));
            y -= step;
            if (std::fabs(step) < 1e-16) break;
        }
        return y;
    };
    return {"conjugated_rotation",
            [=](double x, double t) { return hb(hb_inv(x) + t); },
            [=](double x, double t) { return 1.0 + eps * std::cos(tau * (hb_inv(x) + t)); }};
}

namespace detail {

struct PathPoint {
    const LiftPath* path;
    double t;

    template <class Real>
    Real value(Real x) const { return Real(path->value(to_double(x), t)); }
};

}  // namespace detail

struct BrunovskyResult {
    double lhs = 0.0;  // (rot(t + delta) - rot(t - delta)) / 2 delta
    double rhs = 0.0;  // integral of d g_t / dt over the circle
    double gap = 0.0;
};

inline double rotation_of_path(const LiftPath& path, double t, double tol = 1e-12) {
    FareyOptions opt;
    opt.tol = tol;
    return detail::farey<double>(detail::PathPoint{&path, t}, opt).value;
}

inline BrunovskyResult brunovsky_check(const LiftPath& path, double t, double delta, int quadrature = 4096) {
    if (!(delta > 0.0)) throw DomainError("brunovsky_check: delta must be positive");
    FareyOptions opt;
    opt.tol = 1e-12;
    RotationEstimate at = detail::farey<double>(detail::PathPoint{&path, t}, opt);
    if (at.locked) throw PreconditionFailed("brunovsky_check: g_t is locked at " + at.locked->str());
    BrunovskyResult r;
    r.lhs = (rotation_of_path(path, t + delta) - rotation_of_path(path, t - delta)) / (2.0 * delta);
    // Periodic trapezoid rule.
    double s = 0.0;
    for (int k = 0; k < quadrature; ++k) s += path.dt(static_cast<double>(k) / quadrature, t);
    r.rhs = s / quadrature;
    r.gap = std::fabs(r.lhs - r.rhs);
    return r;
}

}  // namespace rotascope
