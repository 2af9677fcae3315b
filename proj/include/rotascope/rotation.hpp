#pragma once

// Rotation-number estimation for degree-one lifts.
//
// The Farey estimator keeps a bracket lo <= rho <= hi of Farey neighbours and
// decides on which side of a mediant p/q the rotation number lies from the
// sign of g(x) = F^q(x) - x - p:
//
//   g(x) > 0 for one x   =>  rho >= p/q
//   g(x) < 0 for one x   =>  rho <= p/q
//   min g <= 0 <= max g  =>  rho  = p/q   (F^q - p has a fixed point)
//
// A single orbit point settles the first two cases at cost q.  The grid
// min/max test, which certifies mode locking, is used when the single point
// is inconclusive and on the final bracket endpoint.  Runs of consecutive
// moves on one side are traversed by galloping, so the number of tests grows
// with the number of partial quotients rather than with their size.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "rotascope/circle_map.hpp"
#include "rotascope/cont_frac.hpp"
#include "rotascope/double_double.hpp"
#include "rotascope/errors.hpp"

namespace rotascope {

enum class Method { birkhoff, farey };

inline const char* to_string(Method m) { return m == Method::birkhoff ? "birkhoff" : "farey"; }

struct RotationEstimate {
    double value = 0.0;
    double radius = 0.0;
    std::int64_t n_used = 0;  // iterations (Birkhoff) or largest denominator tested (Farey)
    Method method = Method::farey;
    std::optional<Rational> locked;
    Rational lower{0, 1};  // Farey bracket
    Rational upper{1, 1};
    bool resolved = true;  // false when the q-cap stopped refinement before tol
    std::vector<Rational> trail;  // turning points of the Stern-Brocot descent

    double lo() const { return value - radius; }
    double hi() const { return value + radius; }
};

struct FareyOptions {
    double tol = 1e-10;
    std::int64_t qcap = 0;       // largest mediant denominator; 0 = arithmetic default
    std::int64_t lock_qcap = 0;  // largest denominator for grid lock tests; 0 = default
    int grid = 1024;
    int refine = 3;  // local extrema refined by golden section
    double x0 = 0.0;
    bool detect_lock = true;
};

template <class Real>
constexpr std::int64_t default_qcap() { return 1'000'000; }

template <class Real>
constexpr std::int64_t default_lock_qcap() {
    return std::is_same_v<Real, double> ? 10'000 : 100'000;
}

/// Calls f(double{}) or f(DoubleDouble{}) according to the requested arithmetic.
template <class F>
decltype(auto) with_arithmetic(Arithmetic a, F&& f) {
    if (a == Arithmetic::double_double) return f(DoubleDouble{});
    return f(double{});
}

namespace detail {

template <class Real>
Real from_int(std::int64_t v) {
    if constexpr (std::is_same_v<Real, double>) return static_cast<double>(v);
    else return DoubleDouble(v);
}

/// F^q(x) - x - p, iterating in [0,1) and carrying the integer part exactly.
template <class Real, class Map>
Real excess(const Map& map, Real x, std::int64_t q, std::int64_t p) {
    Real y = x - floor_of(x);
    const Real y0 = y;
    std::int64_t shift = 0;
    for (std::int64_t i = 0; i < q; ++i) {
        y = map.value(y);
        Real fl = floor_of(y);
        if (to_double(fl) != 0.0) {
            y -= fl;
            shift += static_cast<std::int64_t>(to_double(fl));
        }
    }
    return from_int<Real>(shift - p) + (y - y0);
}

enum class Verdict { above, below, locked, unclear };

template <class Real, class Map>
class MediantTester {
public:
    MediantTester(const Map& map, double x0, int grid, int refine, std::int64_t lock_qcap)
        : map_(map), x0_(x0), grid_(grid), refine_(refine), lock_qcap_(lock_qcap) {}

    /// Rounding allowance on g for a q-fold iterate.
    static double lock_tol(std::int64_t q) {
        return 64.0 * static_cast<double>(std::max<std::int64_t>(q, 1)) * RealTraits<Real>::epsilon;
    }

    double g(double x, const Rational& m) const {
        return to_double(excess<Real>(map_, Real(x), m.q, m.p));
    }

    Verdict single(const Rational& m) const {
        double v = g(x0_, m);
        double tol = lock_tol(m.q);
        if (v > tol) return Verdict::above;
        if (v < -tol) return Verdict::below;
        return Verdict::unclear;
    }

    /// Certified-by-sampling sign structure of g over the circle.
    Verdict grid_test(const Rational& m) const {
        const double tol = lock_tol(m.q);
        const double h = 1.0 / grid_;
        std::vector<double> v(static_cast<std::size_t>(grid_));
        bool has_low = false, has_high = false;
        for (int i = 0; i < grid_; ++i) {
            double gi = g(i * h, m);
            v[static_cast<std::size_t>(i)] = gi;
            has_low = has_low || gi <= tol;
            has_high = has_high || gi >= -tol;
            if (has_low && has_high) return Verdict::locked;
        }
        if (!has_low) {
            double mn = refine_extremum(v, m, /*want_max=*/false);
            return mn <= tol ? Verdict::locked : Verdict::above;
        }
        double mx = refine_extremum(v, m, /*want_max=*/true);
        return mx >= -tol ? Verdict::locked : Verdict::below;
    }

    Verdict compare(const Rational& m) const {
        Verdict v = single(m);
        if (v != Verdict::unclear) return v;
        if (m.q <= lock_qcap_) return grid_test(m);
        return Verdict::unclear;
    }

    /// max_x g (want_max) or min_x g over the circle: grid plus refinement.
    double extremum(const Rational& m, bool want_max) const {
        const double h = 1.0 / grid_;
        std::vector<double> v(static_cast<std::size_t>(grid_));
        for (int i = 0; i < grid_; ++i) v[static_cast<std::size_t>(i)] = g(i * h, m);
        return refine_extremum(v, m, want_max);
    }

    std::int64_t lock_qcap() const { return lock_qcap_; }

private:
    double refine_extremum(const std::vector<double>& v, const Rational& m, bool want_max) const {
        const int n = grid_;
        const double h = 1.0 / n;
        const double s = want_max ? 1.0 : -1.0;
        std::vector<std::pair<double, int>> cands;
        for (int i = 0; i < n; ++i) {
            double cur = s * v[static_cast<std::size_t>(i)];
            double prev = s * v[static_cast<std::size_t>((i + n - 1) % n)];
            double next = s * v[static_cast<std::size_t>((i + 1) % n)];
            if (cur >= prev && cur >= next) cands.emplace_back(cur, i);
        }
        double best = -INFINITY;
        for (double x : v) best = std::max(best, s * x);
        std::sort(cands.begin(), cands.end(), [](auto& a, auto& b) { return a.first > b.first; });
        if (cands.size() > static_cast<std::size_t>(refine_)) cands.resize(static_cast<std::size_t>(refine_));
        for (auto& [val, i] : cands) {
            auto f = [&](double x) { return s * g(x, m); };
            best = std::max(best, golden_max(f, (i - 1) * h, (i + 1) * h, 60));
        }
        return s * best;
    }

    const Map& map_;
    double x0_;
    int grid_;
    int refine_;
    std::int64_t lock_qcap_;
};

inline double bracket_width(const Rational& lo, const Rational& hi) {
    __int128 num = static_cast<__int128>(hi.p) * lo.q - static_cast<__int128>(lo.p) * hi.q;
    return static_cast<double>(num) / (static_cast<double>(lo.q) * static_cast<double>(hi.q));
}

// Records the last node of each maximal run of same-side moves.
struct TurnTracker {
    int last_side = 0;
    Rational last{};
    std::vector<Rational> turns;
    void move(int side, const Rational& node) {
        if (last_side != 0 && side != last_side) turns.push_back(last);
        last_side = side;
        last = node;
    }
    std::vector<Rational> finish() {
        if (last_side != 0) turns.push_back(last);
        return std::move(turns);
    }
};

template <class Real, class Map>
RotationEstimate farey(const Map& map, const FareyOptions& opt) {
    if (!(opt.tol > 0.0)) throw DomainError("rotation_farey: tol must be positive");
    const std::int64_t qcap = opt.qcap > 0 ? opt.qcap : default_qcap<Real>();
    const std::int64_t lock_qcap = opt.lock_qcap > 0 ? opt.lock_qcap : default_lock_qcap<Real>();
    MediantTester<Real, Map> tester(map, opt.x0, opt.grid, opt.refine, lock_qcap);

    RotationEstimate est;
    est.method = Method::farey;
    auto locked_at = [&](const Rational& r) {
        est.locked = r;
        est.lower = est.upper = r;
        est.value = r.value();
        est.radius = 0.0;
        est.n_used = std::max(est.n_used, r.q);
        return est;
    };

    double d1 = to_double(excess<Real>(map, Real(opt.x0), 1, 0));
    auto n = static_cast<std::int64_t>(std::floor(d1));
    Rational lo{n, 1}, hi{n + 1, 1};
    TurnTracker turns;
    bool neighbours = true;
    bool capped = false;

    while (bracket_width(lo, hi) > opt.tol && !capped) {
        Rational m = mediant(lo, hi);
        if (m.q > qcap) { capped = true; break; }
        est.n_used = std::max(est.n_used, m.q);
        Verdict v = tester.compare(m);
        if (v == Verdict::locked) { est.trail = turns.finish(); return locked_at(m); }
        if (v == Verdict::unclear) { capped = true; break; }

        const bool lo_moves = v == Verdict::above;
        // Candidates m_k = lo + k*hi (lo moves up) or k*lo + hi (hi moves down).
        auto cand = [&](std::int64_t k) {
            return lo_moves ? Rational{lo.p + k * hi.p, lo.q + k * hi.q}
                            : Rational{k * lo.p + hi.p, k * lo.q + hi.q};
        };
        const Verdict good = lo_moves ? Verdict::above : Verdict::below;
        const std::int64_t fixed_q = lo_moves ? hi.q : lo.q;
        const std::int64_t base_q = lo_moves ? lo.q : hi.q;
        const std::int64_t max_k = (qcap - base_q) / fixed_q;

        std::int64_t k_good = 1, k_bad = 0;
        auto width_at = [&](std::int64_t k) {
            Rational c = cand(k);
            return lo_moves ? bracket_width(c, hi) : bracket_width(lo, c);
        };
        // Gallop.
        while (width_at(k_good) > opt.tol) {
            std::int64_t k_try = std::min(2 * k_good, max_k);
            if (k_try <= k_good) { capped = true; break; }
            Rational c = cand(k_try);
            est.n_used = std::max(est.n_used, c.q);
            Verdict w = tester.compare(c);
            if (w == Verdict::locked) { est.trail = turns.finish(); return locked_at(c); }
            if (w == good) { k_good = k_try; continue; }
            if (w == Verdict::unclear) { capped = true; break; }
            k_bad = k_try;
            break;
        }
        // Bisect the run between the last good and first bad candidate.
        while (k_bad != 0 && k_bad - k_good > 1) {
            std::int64_t k_mid = k_good + (k_bad - k_good) / 2;
            Rational c = cand(k_mid);
            Verdict w = tester.compare(c);
            if (w == Verdict::locked) { est.trail = turns.finish(); return locked_at(c); }
            if (w == Verdict::unclear) { capped = true; neighbours = false; break; }
            if (w == good) k_good = k_mid; else k_bad = k_mid;
        }
        const Rational moved = cand(k_good);
        const Rational other = k_bad != 0 ? cand(k_bad) : Rational{};
        if (lo_moves) lo = moved; else hi = moved;
        turns.move(lo_moves ? 1 : -1, moved);
        if (k_bad != 0) {
            if (lo_moves) hi = other; else lo = other;
            if (neighbours) turns.move(lo_moves ? -1 : 1, other);
        }
    }

    if (opt.detect_lock) {
        std::vector<Rational> ends;
        if (lo.q <= hi.q) ends.push_back(lo);
        if (hi.q <= lo.q) ends.push_back(hi);
        for (const Rational& e : ends) {
            if (e.q > lock_qcap) continue;
            if (tester.grid_test(e) == Verdict::locked) {
                est.trail = turns.finish();
                return locked_at(e);
            }
        }
    }

    est.trail = turns.finish();
    est.lower = lo;
    est.upper = hi;
    double w = bracket_width(lo, hi);
    est.radius = w / 2.0;
    est.value = lo.value() + est.radius;
    est.resolved = !capped && w <= opt.tol;
    return est;
}

/// sign(rho - alpha): +1, -1, or 0 when undecidable within the q-cap.
template <class Real, class Map>
int compare_rotation(const Map& map, double alpha, const FareyOptions& opt) {
    const std::int64_t qcap = opt.qcap > 0 ? opt.qcap : default_qcap<Real>();
    const std::int64_t lock_qcap = opt.lock_qcap > 0 ? opt.lock_qcap : default_lock_qcap<Real>();
    MediantTester<Real, Map> tester(map, opt.x0, opt.grid, opt.refine, lock_qcap);

    double d1 = to_double(excess<Real>(map, Real(opt.x0), 1, 0));
    auto n = static_cast<std::int64_t>(std::floor(d1));
    Rational lo{n, 1}, hi{n + 1, 1};
    {
        int c_lo = compare_to_rational(alpha, lo);
        int c_hi = compare_to_rational(alpha, hi);
        if (c_lo < 0) return 1;
        if (c_hi > 0) return -1;
        if (c_lo == 0 || c_hi == 0) return 0;
    }
    auto by_verdict_locked = [&](const Rational& r) { return -compare_to_rational(alpha, r); };

    for (;;) {
        Rational m = mediant(lo, hi);
        int side = compare_to_rational(alpha, m);
        if (side == 0) return 0;
        const bool up = side > 0;  // alpha above the mediant: candidates lo + k*hi increase
        auto cand = [&](std::int64_t k) {
            return up ? Rational{lo.p + k * hi.p, lo.q + k * hi.q}
                      : Rational{k * lo.p + hi.p, k * lo.q + hi.q};
        };
        // K = largest k with alpha strictly beyond cand(k) in the run direction.
        long double num = up ? static_cast<long double>(alpha) * lo.q - lo.p
                             : static_cast<long double>(hi.p) - static_cast<long double>(alpha) * hi.q;
        long double den = up ? static_cast<long double>(hi.p) - static_cast<long double>(alpha) * hi.q
                             : static_cast<long double>(alpha) * lo.q - lo.p;
        long double kf = num / den;
        // Candidates with k > qcap exceed the cap anyway.
        const auto k_max = qcap + 1;
        auto K = static_cast<std::int64_t>(
            std::clamp<long double>(std::ceil(kf) - 1.0L, 1.0L, static_cast<long double>(k_max)));
        auto beyond = [&](std::int64_t k) {
            int c = compare_to_rational(alpha, cand(k));
            return up ? c > 0 : c < 0;
        };
        while (K > 1 && !beyond(K)) --K;
        while (K < k_max && beyond(K + 1)) ++K;

        Rational near = cand(K);      // on the same side of alpha as the run start
        Rational far = cand(K + 1);   // first candidate past alpha
        if (compare_to_rational(alpha, far) == 0) return 0;
        if (near.q > qcap) {
            // Last candidate under the cap still lies on the near side of alpha.
            const std::int64_t step = up ? hi.q : lo.q;
            const std::int64_t base = up ? lo.q : hi.q;
            const std::int64_t kc = (qcap - base) / step;
            if (kc < 1) return 0;
            Verdict vc = tester.compare(cand(kc));
            if (vc == Verdict::locked) return by_verdict_locked(cand(kc));
            if (up && vc == Verdict::below) return -1;
            if (!up && vc == Verdict::above) return 1;
            return 0;
        }

        Verdict vn = tester.compare(near);
        if (vn == Verdict::locked) return by_verdict_locked(near);
        if (vn == Verdict::unclear) return 0;
        // up: near < alpha, so rho <= near settles rho < alpha.
        if (up && vn == Verdict::below) return -1;
        if (!up && vn == Verdict::above) return 1;

        if (far.q > qcap) return 0;
        Verdict vf = tester.compare(far);
        if (vf == Verdict::locked) return by_verdict_locked(far);
        if (vf == Verdict::unclear) return 0;
        if (up && vf == Verdict::above) return 1;
        if (!up && vf == Verdict::below) return -1;

        if (up) { lo = near; hi = far; } else { hi = near; lo = far; }
    }
}

/// Enclosure of rho from the far-end Birkhoff quotient: |F^n(x) - x - n rho| < 1.
template <class Real, class Map>
RotationEstimate birkhoff(const Map& map, double x0, std::int64_t n) {
    if (n < 1) throw DomainError("rotation_birkhoff: n must be >= 1");
    if (n > kDefaultIterationCap) throw CapExceeded("rotation_birkhoff: n exceeds iteration cap");
    RotationEstimate est;
    est.method = Method::birkhoff;
    est.n_used = n;
    est.value = to_double(excess<Real>(map, Real(x0), n, 0)) / static_cast<double>(n);
    est.radius = 1.0 / static_cast<double>(n);
    return est;
}

}  // namespace detail

inline RotationEstimate rotation_birkhoff(const FamilyPoint& fp, double x0, std::int64_t n) {
    return with_arithmetic(fp.lift.arithmetic(), [&](auto tag) {
        using Real = decltype(tag);
        return detail::birkhoff<Real>(fp, x0, n);
    });
}

inline RotationEstimate rotation_farey(const FamilyPoint& fp, const FareyOptions& opt = {}) {
    return with_arithmetic(fp.lift.arithmetic(), [&](auto tag) {
        using Real = decltype(tag);
        return detail::farey<Real>(fp, opt);
    });
}

inline RotationEstimate rotation_farey(const FamilyPoint& fp, double tol) {
    FareyOptions opt;
    opt.tol = tol;
    return rotation_farey(fp, opt);
}

/// sign(rho(f_t) - alpha), or 0 when the q-cap is reached first.
inline int compare_rotation(const FamilyPoint& fp, double alpha, const FareyOptions& opt = {}) {
    return with_arithmetic(fp.lift.arithmetic(), [&](auto tag) {
        using Real = decltype(tag);
        return detail::compare_rotation<Real>(fp, alpha, opt);
    });
}

}  // namespace rotascope
