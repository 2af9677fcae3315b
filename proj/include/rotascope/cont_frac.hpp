#pragma once

// Continued fractions, convergents and closest returns.
//
// Floating inputs are expanded exactly (a binary64 or double-double value is
// a dyadic rational) and the expansion is cut when the residual falls below
// q_k^2 * eps, the point past which the quotients describe rounding noise
// rather than the real number the input approximates.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rotascope/double_double.hpp"
#include "rotascope/errors.hpp"

namespace rotascope {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Reduced fraction p/q with q > 0.
struct Rational {
    std::int64_t p = 0;
    std::int64_t q = 1;

    static Rational make(std::int64_t p, std::int64_t q) {
        if (q == 0) throw DomainError("rational with zero denominator");
        if (q < 0) {
            p = -p;
            q = -q;
        }
        std::int64_t g = std::gcd(p < 0 ? -p : p, q);
        if (g > 1) {
            p /= g;
            q /= g;
        }
        return {p, q};
    }

    double value() const { return static_cast<double>(p) / static_cast<double>(q); }
    DoubleDouble value_dd() const { return DoubleDouble(p) / DoubleDouble(q); }
    std::string str() const { return std::to_string(p) + "/" + std::to_string(q); }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        __int128 lhs = static_cast<__int128>(a.p) * b.q;
        __int128 rhs = static_cast<__int128>(b.p) * a.q;
        return lhs <=> rhs;
    }
};

inline Rational mediant(const Rational& a, const Rational& b) {
    return {a.p + b.p, a.q + b.q};
}

/// sign(alpha - p/q), exact for binary64 alpha.
inline int compare_to_rational(double alpha, const Rational& r) {
    double d = std::fma(alpha, static_cast<double>(r.q), -static_cast<double>(r.p));
    if (static_cast<double>(r.q) >= 0x1p53 || std::fabs(static_cast<double>(r.p)) >= 0x1p53) {
        // Denominator no longer exact in binary64: fall back to exact arithmetic.
        BigRational a(alpha);
        BigRational b(BigInt(r.p), BigInt(r.q));
        return a < b ? -1 : (a > b ? 1 : 0);
    }
    return (d > 0) - (d < 0);
}

/// Distance from x to the nearest integer, in [0, 1/2].
inline double circle_distance(double x) {
    double f = x - std::floor(x);
    return std::min(f, 1.0 - f);
}

struct ContinuedFraction {
    std::vector<std::int64_t> a;     // a_0, a_1, ...
    std::vector<Rational> convergents;  // p_k / q_k
    bool exact = false;              // expansion terminated with zero residual
};

namespace detail {

inline BigRational to_big(double x) {
    return BigRational(x);
}

inline BigRational to_big(DoubleDouble x) {
    return BigRational(x.hi()) + BigRational(x.lo());
}

inline BigInt floor_big(const BigInt& num, const BigInt& den) {
    BigInt q = num / den;  // truncates toward zero, den > 0
    if (num < 0 && q * den != num) q -= 1;
    return q;
}

// Euclid on num/den with an optional residual floor eps (0 = exact input).
inline ContinuedFraction expand(BigInt num, BigInt den, int max_terms, double eps) {
    ContinuedFraction cf;
    if (max_terms < 1) throw DomainError("continued_fraction: max_terms must be >= 1");
    constexpr std::int64_t kLimit = std::int64_t{1} << 62;
    BigInt p_prev = 1, q_prev = 0, p_prev2 = 0, q_prev2 = 1;
    for (int k = 0; k < max_terms; ++k) {
        BigInt a = floor_big(num, den);
        BigInt p = a * p_prev + p_prev2;
        BigInt q = a * q_prev + q_prev2;
        if (boost::multiprecision::abs(p) > kLimit || q > kLimit || boost::multiprecision::abs(a) > kLimit) {
            return cf;  // no longer representable; truncated
        }
        cf.a.push_back(static_cast<std::int64_t>(a));
        cf.convergents.push_back({static_cast<std::int64_t>(p), static_cast<std::int64_t>(q)});
        p_prev2 = p_prev;
        q_prev2 = q_prev;
        p_prev = p;
        q_prev = q;

        BigInt rem = num - a * den;  // residual = rem / den in [0, 1)
        if (rem == 0) {
            cf.exact = true;
            return cf;
        }
        if (eps > 0.0) {
            double residual = static_cast<double>(BigRational(rem, den));
            double qd = static_cast<double>(q);
            if (residual < qd * qd * eps) return cf;
        }
        num = den;
        den = rem;
    }
    return cf;
}

}  // namespace detail

inline ContinuedFraction continued_fraction(const BigRational& alpha, int max_terms) {
    return detail::expand(boost::multiprecision::numerator(alpha),
                          boost::multiprecision::denominator(alpha), max_terms, 0.0);
}

inline ContinuedFraction continued_fraction(const Rational& alpha, int max_terms) {
    return continued_fraction(BigRational(BigInt(alpha.p), BigInt(alpha.q)), max_terms);
}

inline ContinuedFraction continued_fraction(double alpha, int max_terms) {
    if (!std::isfinite(alpha)) throw DomainError("continued_fraction: non-finite input");
    BigRational x = detail::to_big(alpha);
    return detail::expand(boost::multiprecision::numerator(x), boost::multiprecision::denominator(x),
                          max_terms, RealTraits<double>::epsilon * std::max(1.0, std::fabs(alpha)));
}

inline ContinuedFraction continued_fraction(DoubleDouble alpha, int max_terms) {
    BigRational x = detail::to_big(alpha);
    return detail::expand(boost::multiprecision::numerator(x), boost::multiprecision::denominator(x),
                          max_terms,
                          RealTraits<DoubleDouble>::epsilon * std::max(1.0, std::fabs(alpha.hi())));
}

/// (P + sqrt(D)) / Q with D a non-square, Q > 0 and Q | (D - P^2).
struct QuadraticIrrational {
    std::int64_t P;
    std::int64_t Q;
    std::int64_t D;

    static QuadraticIrrational golden() { return {-1, 2, 5}; }      // (sqrt5 - 1)/2
    static QuadraticIrrational sqrt2_minus_1() { return {-1, 1, 2}; }

    double value() const {
        return (static_cast<double>(P) + std::sqrt(static_cast<double>(D))) / static_cast<double>(Q);
    }
};

/// Exact periodic expansion of a quadratic irrational (integer arithmetic only).
inline ContinuedFraction continued_fraction(const QuadraticIrrational& x, int max_terms) {
    if (x.Q <= 0 || x.D <= 0 || (x.D - x.P * x.P) % x.Q != 0)
        throw DomainError("quadratic irrational must satisfy Q > 0 and Q | D - P^2");
    auto s = static_cast<std::int64_t>(std::sqrt(static_cast<double>(x.D)));
    while (s * s > x.D) --s;
    while ((s + 1) * (s + 1) <= x.D) ++s;
    if (s * s == x.D) throw DomainError("quadratic irrational requires non-square D");

    ContinuedFraction cf;
    std::int64_t P = x.P, Q = x.Q;
    std::int64_t p1 = 1, q1 = 0, p2 = 0, q2 = 1;
    for (int k = 0; k < max_terms; ++k) {
        std::int64_t num = P + s;
        std::int64_t a = num >= 0 ? num / Q : -((-num + Q - 1) / Q);
        __int128 p = static_cast<__int128>(a) * p1 + p2;
        __int128 q = static_cast<__int128>(a) * q1 + q2;
        if (q > (__int128{1} << 62) || p > (__int128{1} << 62) || p < -(__int128{1} << 62)) break;
        cf.a.push_back(a);
        cf.convergents.push_back({static_cast<std::int64_t>(p), static_cast<std::int64_t>(q)});
        p2 = p1;
        q2 = q1;
        p1 = static_cast<std::int64_t>(p);
        q1 = static_cast<std::int64_t>(q);
        P = a * Q - P;
        Q = (x.D - P * P) / Q;
    }
    return cf;
}

struct ClosestReturn {
    std::int64_t q;
    std::int64_t p;  // nearest integer to q*alpha
    int sign;        // sign of q*alpha - p

    friend bool operator==(const ClosestReturn&, const ClosestReturn&) = default;
};

namespace detail {

/// Running-minimum scan of |q alpha|_{S^1}, q = 1..Q.
inline std::vector<ClosestReturn> closest_returns_direct(double alpha, std::int64_t Q) {
    std::vector<ClosestReturn> out;
    double best = 1.0;
    for (std::int64_t q = 1; q <= Q; ++q) {
        double qd = static_cast<double>(q);
        double n = std::nearbyint(qd * alpha);
        double d = std::fma(qd, alpha, -n);
        if (std::fabs(d) < best) {
            best = std::fabs(d);
            out.push_back({q, static_cast<std::int64_t>(n), (d > 0) - (d < 0)});
        }
    }
    return out;
}

/// Convergent denominators q_k <= Q.
inline std::vector<ClosestReturn> closest_returns_convergent(double alpha, std::int64_t Q) {
    std::vector<ClosestReturn> out;
    ContinuedFraction cf = continued_fraction(alpha, 200);
    if (!cf.exact && cf.convergents.back().q <= Q)
        throw DegenerateInput("closest_returns: expansion of alpha exhausted before q reached Q");
    for (std::size_t k = 0; k < cf.convergents.size(); ++k) {
        const Rational& c = cf.convergents[k];
        if (c.q > Q) break;
        int sign = (k % 2 == 0) ? 1 : -1;
        if (cf.exact && k + 1 == cf.convergents.size()) sign = 0;
        if (!out.empty() && out.back().q == c.q) {
            // q_0 = q_1 = 1 when a_1 = 1: keep the nearer numerator.
            out.back() = {c.q, c.p, sign};
            continue;
        }
        out.push_back({c.q, c.p, sign});
    }
    return out;
}

}  // namespace detail

/// Closest returns q <= Q of alpha: |j alpha|_{S^1} > |q alpha|_{S^1} for all 0 < j < q.
/// Direct verification when Q <= 10^4, otherwise read off the convergents.
inline std::vector<ClosestReturn> closest_returns(double alpha, std::int64_t Q) {
    if (Q < 1) throw DomainError("closest_returns: Q must be >= 1");
    if (Q <= 10'000) return detail::closest_returns_direct(alpha, Q);
    return detail::closest_returns_convergent(alpha, Q);
}

struct ConvergentTest {
    bool holds_hypothesis = false;  // |alpha - p/q| < q^{-d}
    bool is_convergent = false;     // p/q among the convergents of alpha
    bool implication_ok = true;     // holds_hypothesis => is_convergent
};

inline ConvergentTest convergent_test(double alpha, const Rational& pq, double d) {
    if (pq.q <= 1 || !(d > 3.0)) throw DomainError("convergent_test requires q > 1 and d > 3");
    ConvergentTest r;
    double qd = static_cast<double>(pq.q);
    double gap = std::fabs(std::fma(alpha, qd, -static_cast<double>(pq.p))) / qd;
    r.holds_hypothesis = gap < std::pow(qd, -d);
    ContinuedFraction cf = continued_fraction(alpha, 96);
    Rational target = Rational::make(pq.p, pq.q);
    r.is_convergent = std::find(cf.convergents.begin(), cf.convergents.end(), target) != cf.convergents.end();
    r.implication_ok = !r.holds_hypothesis || r.is_convergent;
    return r;
}

/// Exact-input variant: alpha is an arbitrary-precision rational.
inline ConvergentTest convergent_test(const BigRational& alpha, const Rational& pq, double d) {
    if (pq.q <= 1 || !(d > 3.0)) throw DomainError("convergent_test requires q > 1 and d > 3");
    ConvergentTest r;
    BigRational gap = alpha - BigRational(BigInt(pq.p), BigInt(pq.q));
    if (gap < 0) gap = -gap;
    if (gap == 0) {
        r.holds_hypothesis = true;
    } else {
        using boost::multiprecision::denominator;
        using boost::multiprecision::numerator;
        double log_gap = std::log(static_cast<double>(numerator(gap))) -
                         std::log(static_cast<double>(denominator(gap)));
        r.holds_hypothesis = log_gap < -d * std::log(static_cast<double>(pq.q));
    }
    ContinuedFraction cf = continued_fraction(alpha, 200);
    Rational target = Rational::make(pq.p, pq.q);
    r.is_convergent = std::find(cf.convergents.begin(), cf.convergents.end(), target) != cf.convergents.end();
    r.implication_ok = !r.holds_hypothesis || r.is_convergent;
    return r;
}

}  // namespace rotascope
