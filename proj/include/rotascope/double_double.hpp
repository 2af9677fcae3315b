#pragma once

// Double-double arithmetic: an unevaluated sum hi + lo of two binary64
// numbers with |lo| <= ulp(hi)/2, giving about 106 bits of significand.
// Only the operations needed by lift evaluation and orbit iteration are
// provided (field operations, floor, sin/cos of 2*pi*x).

#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>

namespace rotascope {

class DoubleDouble {
public:
    constexpr DoubleDouble() = default;
    constexpr DoubleDouble(double x) : hi_(x), lo_(0.0) {}  // NOLINT implicit by design of numeric type
    constexpr DoubleDouble(int x) : hi_(x), lo_(0.0) {}     // NOLINT
    DoubleDouble(std::int64_t x) {                          // NOLINT
        hi_ = static_cast<double>(x);
        lo_ = static_cast<double>(x - static_cast<std::int64_t>(hi_));
    }
    constexpr DoubleDouble(double hi, double lo) : hi_(hi), lo_(lo) {}

    constexpr double hi() const { return hi_; }
    constexpr double lo() const { return lo_; }
    explicit constexpr operator double() const { return hi_ + lo_; }

    static DoubleDouble two_sum(double a, double b) {
        double s = a + b;
        double bb = s - a;
        double e = (a - (s - bb)) + (b - bb);
        return {s, e};
    }
    static DoubleDouble quick_two_sum(double a, double b) {
        double s = a + b;
        return {s, b - (s - a)};
    }
    static DoubleDouble two_prod(double a, double b) {
        double p = a * b;
        return {p, std::fma(a, b, -p)};
    }

    friend DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
        DoubleDouble s = two_sum(a.hi_, b.hi_);
        DoubleDouble t = two_sum(a.lo_, b.lo_);
        s.lo_ += t.hi_;
        s = quick_two_sum(s.hi_, s.lo_);
        s.lo_ += t.lo_;
        return quick_two_sum(s.hi_, s.lo_);
    }
    friend DoubleDouble operator+(DoubleDouble a, double b) {
        DoubleDouble s = two_sum(a.hi_, b);
        s.lo_ += a.lo_;
        return quick_two_sum(s.hi_, s.lo_);
    }
    friend DoubleDouble operator+(double a, DoubleDouble b) { return b + a; }
    friend DoubleDouble operator-(DoubleDouble a) { return {-a.hi_, -a.lo_}; }
    friend DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }
    friend DoubleDouble operator-(DoubleDouble a, double b) { return a + (-b); }
    friend DoubleDouble operator-(double a, DoubleDouble b) { return (-b) + a; }

    friend DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
        DoubleDouble p = two_prod(a.hi_, b.hi_);
        p.lo_ += a.hi_ * b.lo_ + a.lo_ * b.hi_;
        return quick_two_sum(p.hi_, p.lo_);
    }
    friend DoubleDouble operator*(DoubleDouble a, double b) {
        DoubleDouble p = two_prod(a.hi_, b);
        p.lo_ += a.lo_ * b;
        return quick_two_sum(p.hi_, p.lo_);
    }
    friend DoubleDouble operator*(double a, DoubleDouble b) { return b * a; }

    friend DoubleDouble operator/(DoubleDouble a, DoubleDouble b) {
        double q1 = a.hi_ / b.hi_;
        DoubleDouble r = a - b * q1;
        double q2 = r.hi_ / b.hi_;
        r = r - b * q2;
        double q3 = r.hi_ / b.hi_;
        DoubleDouble q = quick_two_sum(q1, q2);
        return q + q3;
    }
    friend DoubleDouble operator/(DoubleDouble a, double b) { return a / DoubleDouble(b); }
    friend DoubleDouble operator/(double a, DoubleDouble b) { return DoubleDouble(a) / b; }

    DoubleDouble& operator+=(DoubleDouble b) { return *this = *this + b; }
    DoubleDouble& operator-=(DoubleDouble b) { return *this = *this - b; }
    DoubleDouble& operator*=(DoubleDouble b) { return *this = *this * b; }
    DoubleDouble& operator/=(DoubleDouble b) { return *this = *this / b; }

    friend bool operator==(DoubleDouble a, DoubleDouble b) {
        return a.hi_ == b.hi_ && a.lo_ == b.lo_;
    }
    friend std::partial_ordering operator<=>(DoubleDouble a, DoubleDouble b) {
        if (auto c = a.hi_ <=> b.hi_; c != 0) return c;
        return a.lo_ <=> b.lo_;
    }

    friend std::ostream& operator<<(std::ostream& os, DoubleDouble x) {
        return os << x.hi_ << (x.lo_ < 0 ? "" : "+") << x.lo_;
    }

private:
    double hi_ = 0.0;
    double lo_ = 0.0;
};

// Scalar helpers overloaded for double and DoubleDouble so that templated
// numerics can be written once.

inline double to_double(double x) { return x; }
inline double to_double(DoubleDouble x) { return static_cast<double>(x); }

inline double floor_of(double x) { return std::floor(x); }
inline DoubleDouble floor_of(DoubleDouble x) {
    double f = std::floor(x.hi());
    if (f == x.hi()) return DoubleDouble::quick_two_sum(f, std::floor(x.lo()));
    return {f, 0.0};
}

inline double abs_of(double x) { return std::fabs(x); }
inline DoubleDouble abs_of(DoubleDouble x) { return x.hi() < 0.0 ? -x : x; }

inline double log_of(double x) { return std::log(x); }
inline double log_of(DoubleDouble x) { return std::log(x.hi()) + x.lo() / x.hi(); }

template <class Real>
struct RealTraits;

template <>
struct RealTraits<double> {
    static constexpr double epsilon = 0x1p-52;
    static constexpr int digits10 = 15;
};

template <>
struct RealTraits<DoubleDouble> {
    static constexpr double epsilon = 0x1p-104;
    static constexpr int digits10 = 31;
};

namespace detail {

inline constexpr DoubleDouble kTwoPiDD{6.283185307179586232e+00, 2.449293598294706414e-16};

// sin and cos of z for |z| <= pi/4 by Taylor series.
inline void sincos_small(DoubleDouble z, DoubleDouble& s, DoubleDouble& c) {
    DoubleDouble z2 = z * z;
    DoubleDouble term = z;
    s = z;
    for (int k = 1; k < 40; ++k) {
        term = term * z2 / static_cast<double>((2 * k) * (2 * k + 1));
        term = -term;
        s += term;
        if (std::fabs(term.hi()) < 1e-34) break;
    }
    term = DoubleDouble(1.0);
    c = term;
    for (int k = 1; k < 40; ++k) {
        term = term * z2 / static_cast<double>((2 * k - 1) * (2 * k));
        term = -term;
        c += term;
        if (std::fabs(term.hi()) < 1e-34) break;
    }
}

}  // namespace detail

/// sin(2*pi*x) and cos(2*pi*x) with exact reduction of x modulo 1.
inline void sincos_2pi(double x, double& s, double& c) {
    double r = x - std::nearbyint(x);
    double z = 6.283185307179586 * r;
    s = std::sin(z);
    c = std::cos(z);
}

inline void sincos_2pi(DoubleDouble x, DoubleDouble& s, DoubleDouble& c) {
    DoubleDouble r = x - floor_of(x + 0.5);  // r in [-1/2, 1/2)
    double quarter = std::nearbyint(4.0 * r.hi());
    DoubleDouble rr = r - quarter * 0.25;  // |rr| <= 1/8 (up to rounding)
    DoubleDouble zs, zc;
    detail::sincos_small(rr * detail::kTwoPiDD, zs, zc);
    switch ((static_cast<int>(quarter) % 4 + 4) % 4) {
        case 0: s = zs; c = zc; break;
        case 1: s = zc; c = -zs; break;
        case 2: s = -zs; c = -zc; break;
        default: s = -zc; c = zs; break;
    }
}

}  // namespace rotascope
