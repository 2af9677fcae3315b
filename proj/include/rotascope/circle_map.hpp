#pragma once

// Lifts of orientation-preserving circle diffeomorphisms of the form
//
//     f(x) = x + sum_k ( c_k sin(2 pi k x) + d_k cos(2 pi k x) ),   k = 1..m
//
// and the one-parameter family f_t(x) = f(x) + t.  Everything is computed on
// the lift, so f(x + 1) = f(x) + 1 holds by construction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "rotascope/double_double.hpp"
#include "rotascope/errors.hpp"

namespace rotascope {

enum class Arithmetic { binary64, double_double };

class LiftDescriptor {
public:
    /// f(x) = x.
    static LiftDescriptor identity(int precision = 15) {
        return LiftDescriptor("identity", {}, {}, precision);
    }

    /// Standard circle map f(x) = x + K/(2 pi) sin(2 pi x); a diffeomorphism for |K| < 1.
    static LiftDescriptor arnold(double K, int precision = 15) {
        LiftDescriptor d("arnold", {K / (2.0 * std::numbers::pi)}, {}, precision);
        d.arnold_K_ = K;
        return d;
    }

    static LiftDescriptor harmonic(std::vector<double> sin_coeffs, std::vector<double> cos_coeffs,
                                   std::string family = "harmonic", int precision = 15) {
        return LiftDescriptor(std::move(family), std::move(sin_coeffs), std::move(cos_coeffs), precision);
    }

    const std::string& family() const { return family_; }
    const std::vector<double>& sin_coeffs() const { return sin_; }
    const std::vector<double>& cos_coeffs() const { return cos_; }
    int precision() const { return precision_; }
    std::size_t harmonics() const { return std::max(sin_.size(), cos_.size()); }
    bool is_rotation() const { return amplitude() == 0.0; }

    /// K of the standard map when built by arnold(), NaN otherwise.
    double arnold_K() const { return arnold_K_; }

    Arithmetic arithmetic() const {
        return precision_ <= 16 ? Arithmetic::binary64 : Arithmetic::double_double;
    }

    /// sup |f(x) - x| <= sum |c_k| + |d_k|.
    double amplitude() const {
        double a = 0.0;
        for (double c : sin_) a += std::fabs(c);
        for (double d : cos_) a += std::fabs(d);
        return a;
    }

    /// sup |f''| <= sum (2 pi k)^2 (|c_k| + |d_k|).
    double second_derivative_bound() const {
        double b = 0.0;
        for (std::size_t k = 1; k <= harmonics(); ++k) {
            double w = 2.0 * std::numbers::pi * static_cast<double>(k);
            b += w * w * (coef(sin_, k) + coef(cos_, k));
        }
        return b;
    }

    /// Conjugate by x -> -x: the lift -f(-x), i.e. cosine coefficients negated.
    /// Rotation numbers change sign and the family parameter t maps to -t.
    LiftDescriptor reflected() const {
        LiftDescriptor r = *this;
        for (double& d : r.cos_) d = -d;
        return r;
    }

    template <class Real>
    Real value(Real x) const {
        Real acc = x;
        for (std::size_t k = 1; k <= harmonics(); ++k) {
            Real s, c;
            sincos_2pi(x * static_cast<double>(k), s, c);
            acc += s * at(sin_, k) + c * at(cos_, k);
        }
        return acc;
    }

    template <class Real>
    Real deriv(Real x) const {
        Real acc = Real(1.0);
        for (std::size_t k = 1; k <= harmonics(); ++k) {
            Real s, c;
            sincos_2pi(x * static_cast<double>(k), s, c);
            double w = 2.0 * std::numbers::pi * static_cast<double>(k);
            acc += c * (w * at(sin_, k)) - s * (w * at(cos_, k));
        }
        return acc;
    }

    template <class Real>
    Real deriv2(Real x) const {
        Real acc = Real(0.0);
        for (std::size_t k = 1; k <= harmonics(); ++k) {
            Real s, c;
            sincos_2pi(x * static_cast<double>(k), s, c);
            double w = 2.0 * std::numbers::pi * static_cast<double>(k);
            acc -= s * (w * w * at(sin_, k)) + c * (w * w * at(cos_, k));
        }
        return acc;
    }

    friend bool operator==(const LiftDescriptor& a, const LiftDescriptor& b) {
        return a.family_ == b.family_ && a.sin_ == b.sin_ && a.cos_ == b.cos_ &&
               a.precision_ == b.precision_;
    }

private:
    LiftDescriptor(std::string family, std::vector<double> s, std::vector<double> c, int precision)
        : family_(std::move(family)), sin_(std::move(s)), cos_(std::move(c)), precision_(precision) {
        if (precision_ < 15 || precision_ > 32)
            throw DomainError("precision must be between 15 and 32 decimal digits");
        for (double v : sin_)
            if (!std::isfinite(v)) throw DomainError("non-finite lift coefficient");
        for (double v : cos_)
            if (!std::isfinite(v)) throw DomainError("non-finite lift coefficient");
        validate_monotone();
    }

    static double at(const std::vector<double>& v, std::size_t k) { return k <= v.size() ? v[k - 1] : 0.0; }
    static double coef(const std::vector<double>& v, std::size_t k) { return std::fabs(at(v, k)); }

    void validate_monotone() const {
        // Sufficient: 1 - sum 2 pi k (|c_k| + |d_k|) > 0.
        double slack = 1.0;
        for (std::size_t k = 1; k <= harmonics(); ++k)
            slack -= 2.0 * std::numbers::pi * static_cast<double>(k) * (coef(sin_, k) + coef(cos_, k));
        if (slack > 0.0) return;
        // Otherwise grid minimum of f' padded by sup|f''| * h / 2.
        constexpr int kGrid = 1 << 14;
        double h = 1.0 / kGrid;
        double min_d = deriv(0.0);
        for (int i = 1; i < kGrid; ++i) min_d = std::min(min_d, deriv(i * h));
        if (min_d - second_derivative_bound() * h / 2.0 <= 0.0)
            throw DomainError("lift is not an orientation-preserving diffeomorphism (f' not > 0)");
    }

    std::string family_;
    std::vector<double> sin_;
    std::vector<double> cos_;
    int precision_ = 15;
    double arnold_K_ = std::numeric_limits<double>::quiet_NaN();
};

/// f_t = R_t o f, with lift f(x) + t.
struct FamilyPoint {
    LiftDescriptor lift;
    double t = 0.0;

    template <class Real>
    Real value(Real x) const { return lift.value(x) + t; }
    template <class Real>
    Real deriv(Real x) const { return lift.deriv(x); }
};

/// order 0: f_t(x); order 1: f'(x); order 2: f''(x).
inline double eval_lift(const FamilyPoint& fp, double x, int order) {
    switch (order) {
        case 0: return fp.value(x);
        case 1: return fp.deriv(x);
        case 2: return fp.lift.deriv2(x);
        default: throw DomainError("eval_lift: order must be 0, 1 or 2");
    }
}

inline constexpr std::int64_t kDefaultIterationCap = 10'000'000;

template <class Real>
constexpr double inverse_tolerance() {
    return std::is_same_v<Real, double> ? 1e-14 : 1e-29;
}

/// Solves f_t(y) = x by Newton's method safeguarded with bisection.
template <class Real>
Real invert(const FamilyPoint& fp, Real x) {
    Real n = floor_of(x);
    Real r = x - n;
    double spread = fp.lift.amplitude() + std::fabs(fp.t) + 1e-9;
    Real lo = r - spread, hi = r + spread;  // f(y) - y in [t - A, t + A]
    Real y = r - fp.t;
    const double tol = inverse_tolerance<Real>();
    for (int it = 0; it < 200; ++it) {
        Real g = fp.value(y) - r;
        if (abs_of(g) <= Real(tol)) return y + n;
        if (g > Real(0.0)) hi = y; else lo = y;
        Real step = y - g / fp.deriv(y);
        y = (step > lo && step < hi) ? step : (lo + hi) * 0.5;
        if (!(hi - lo > Real(0.0))) break;
    }
    Real g = fp.value(y) - r;
    if (abs_of(g) <= Real(tol)) return y + n;
    throw NonConvergence("invert: residual " + std::to_string(to_double(g)) + " above tolerance");
}

template <class Real>
struct OrbitSegment {
    Real x0{};
    std::int64_t n = 0;
    std::vector<Real> points;  // f_t^j(x0), j = 0..|n| in the direction of n
    std::vector<Real> derivs;  // (f_t^j)'(x0)
};

/// Forward (n > 0) or backward (n < 0) orbit with accumulated derivatives.
template <class Real = double>
OrbitSegment<Real> iterate(const FamilyPoint& fp, Real x0, std::int64_t n,
                           std::int64_t cap = kDefaultIterationCap) {
    std::int64_t steps = n < 0 ? -n : n;
    if (steps > cap) throw CapExceeded("iterate: |n| exceeds cap " + std::to_string(cap));
    OrbitSegment<Real> seg;
    seg.x0 = x0;
    seg.n = n;
    seg.points.reserve(static_cast<std::size_t>(steps) + 1);
    seg.derivs.reserve(static_cast<std::size_t>(steps) + 1);
    Real x = x0;
    Real d = Real(1.0);
    seg.points.push_back(x);
    seg.derivs.push_back(d);
    for (std::int64_t j = 0; j < steps; ++j) {
        if (n > 0) {
            d *= fp.deriv(x);
            x = fp.value(x);
        } else {
            x = invert(fp, x);
            d /= fp.deriv(x);
        }
        seg.points.push_back(x);
        seg.derivs.push_back(d);
    }
    return seg;
}

/// f_t^n(x) for n of either sign, without storing the orbit.
template <class Real = double>
Real iterate_point(const FamilyPoint& fp, Real x, std::int64_t n) {
    if (n >= 0) {
        for (std::int64_t j = 0; j < n; ++j) x = fp.value(x);
    } else {
        for (std::int64_t j = 0; j < -n; ++j) x = invert(fp, x);
    }
    return x;
}

/// M = ||(log f')'||_{C^0} and N = max(M, ||(log (f^{-1})')'||_{C^0}).
struct DistortionConstants {
    double M = 0.0;
    double inverse_side = 0.0;  // sup |f''| / f'^2
    double N = 0.0;
    int grid = 0;
    int refined_maxima = 0;
};

namespace detail {

// Golden-section maximization of a unimodal function on [a, b].
template <class F>
double golden_max(F&& f, double a, double b, int iters = 80) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    double best = std::max(fc, fd);
    for (int i = 0; i < iters && b - a > 1e-15; ++i) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - g * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + g * (b - a); fd = f(d);
        }
        best = std::max({best, fc, fd});
    }
    return best;
}

// Grid maximum of a 1-periodic function plus golden refinement at every local maximum.
template <class F>
std::pair<double, int> periodic_max(F&& f, int grid) {
    std::vector<double> v(static_cast<std::size_t>(grid));
    double h = 1.0 / grid;
    for (int i = 0; i < grid; ++i) v[static_cast<std::size_t>(i)] = f(i * h);
    double best = *std::max_element(v.begin(), v.end());
    int refined = 0;
    for (int i = 0; i < grid; ++i) {
        double prev = v[static_cast<std::size_t>((i + grid - 1) % grid)];
        double next = v[static_cast<std::size_t>((i + 1) % grid)];
        double cur = v[static_cast<std::size_t>(i)];
        if (cur >= prev && cur > next) {
            best = std::max(best, golden_max(f, (i - 1) * h, (i + 1) * h));
            ++refined;
        }
    }
    return {best, refined};
}

}  // namespace detail

inline DistortionConstants distortion_constants(const LiftDescriptor& lift, int grid = 1 << 14) {
    DistortionConstants dc;
    dc.grid = grid;
    if (lift.is_rotation()) return dc;
    auto log_deriv = [&](double x) { return std::fabs(lift.deriv2(x) / lift.deriv(x)); };
    auto inverse_log_deriv = [&](double x) {
        double d = lift.deriv(x);
        return std::fabs(lift.deriv2(x)) / (d * d);
    };
    auto [m, r1] = detail::periodic_max(log_deriv, grid);
    auto [inv, r2] = detail::periodic_max(inverse_log_deriv, grid);
    dc.M = m;
    dc.inverse_side = inv;
    dc.N = std::max(m, inv);
    dc.refined_maxima = r1 + r2;
    return dc;
}

}  // namespace rotascope
