#pragma once

// Interval combinatorics around a closest return q_n of alpha = rho(f_{t0}).
//
// Everything is built in the orientation where q_n alpha - p_n < 0, i.e. the
// convergent lies above alpha and the nearest point of its plateau is to the
// right of t0.  The opposite parity is handled by conjugating with x -> -x
// (LiftDescriptor::reflected), which flips alpha, p and t.
//
// With F = lift of f_{t0}, q = q_n, p = p_n:
//   L(x)   = [x, F^{-q}(x) + p]
//   K(x)   = [x, F^{q_{n-1}}(x) - p_{n-1}]
//   I_i(x) = [F(F_t^{i-1} x), F_t^i x],          i = 1..q
//   L^(x)  = [x, F^{-q}(F_t^q x)]
//   l^(x)  = m( union_{j=1..q} f^j L^(x) )
// where t > 0 is the distance from t0 to the left end of the p/q plateau.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rotascope/circle_map.hpp"
#include "rotascope/cont_frac.hpp"
#include "rotascope/errors.hpp"
#include "rotascope/rotation.hpp"
#include "rotascope/staircase.hpp"

namespace rotascope {

/// Arc [left, right] of the circle, stored in lift coordinates.
struct DynInterval {
    double left = 0.0;
    double right = 0.0;

    double length() const { return right - left; }
};

struct ArcGap {
    std::size_t from;  // arc index
    std::size_t to;    // index of the next arc in circle order
    double gap;        // start of `to` minus end of `from`
};

/// Gaps between cyclically consecutive arcs, in circle order.
inline std::vector<ArcGap> cyclic_gaps(const std::vector<DynInterval>& arcs) {
    struct S { double start, length; std::size_t idx; };
    std::vector<S> s;
    s.reserve(arcs.size());
    for (std::size_t i = 0; i < arcs.size(); ++i)
        s.push_back({arcs[i].left - std::floor(arcs[i].left), arcs[i].length(), i});
    std::sort(s.begin(), s.end(), [](const S& a, const S& b) { return a.start < b.start; });
    std::vector<ArcGap> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const S& next = s[(i + 1) % s.size()];
        double start = (i + 1 < s.size()) ? next.start : next.start + 1.0;
        out.push_back({s[i].idx, next.idx, start - (s[i].start + s[i].length)});
    }
    return out;
}

/// Smallest cyclic gap between the arcs; negative when two arcs overlap.
inline double disjoint_margin(const std::vector<DynInterval>& arcs) {
    if (arcs.empty()) return 1.0;
    double margin = INFINITY;
    for (const auto& g : cyclic_gaps(arcs)) margin = std::min(margin, g.gap);
    return margin;
}

/// Lebesgue measure of a union of arcs, by sorting endpoints and merging.
inline double union_measure(const std::vector<DynInterval>& arcs) {
    std::vector<std::pair<double, double>> pieces;
    for (const auto& a : arcs) {
        double len = a.length();
        if (len >= 1.0) return 1.0;
        if (len <= 0.0) continue;
        double s = a.left - std::floor(a.left);
        double e = s + len;
        if (e <= 1.0) {
            pieces.emplace_back(s, e);
        } else {
            pieces.emplace_back(s, 1.0);
            pieces.emplace_back(0.0, e - 1.0);
        }
    }
    std::sort(pieces.begin(), pieces.end());
    double total = 0.0, cur_s = 0.0, cur_e = -1.0;
    for (auto [s, e] : pieces) {
        if (s > cur_e) {
            if (cur_e > cur_s) total += cur_e - cur_s;
            cur_s = s;
            cur_e = e;
        } else {
            cur_e = std::max(cur_e, e);
        }
    }
    if (cur_e > cur_s) total += cur_e - cur_s;
    return total;
}

struct DenjoyOptions {
    double rho_tol = 1e-12;      // enclosure of rho(t0)
    double plateau_tol = 1e-13;  // plateau end defining t
    double overlap_tol = 1e-12;  // allowed overlap in disjointness tests
    double containment_tol = 1e-9;
    int samples = 16;            // extra base points for the max of l^
    std::uint64_t seed = 0;
};

/// Base data shared by the constructions: the working orientation and the
/// continued fraction of alpha.
struct DenjoyFrame {
    LiftDescriptor lift = LiftDescriptor::identity();  // possibly reflected
    double t0 = 0.0;      // in the working orientation
    double x = 0.0;
    double alpha = 0.0;   // rho(f_{t0}) in the working orientation
    double alpha_radius = 0.0;
    Rational conv;        // p_n/q_n, above alpha
    Rational prev;        // p_{n-1}/q_{n-1}
    std::int64_t a_next = 0;  // a_{n+1}
    bool reflected = false;

    FamilyPoint base() const { return {lift, t0}; }
};

inline DenjoyFrame make_frame(const LiftDescriptor& lift, double t0, double x, int n_index,
                              const DenjoyOptions& opt = {}) {
    RotationEstimate rho = rotation_farey(FamilyPoint{lift, t0}, opt.rho_tol);
    if (rho.locked)
        throw PreconditionFailed("denjoy: rho(t0) is locked at " + rho.locked->str());
    ContinuedFraction cf = continued_fraction(rho.value, 64);
    if (n_index < 1 || static_cast<std::size_t>(n_index) + 1 >= cf.a.size())
        throw PreconditionFailed("denjoy: convergent index " + std::to_string(n_index) +
                                 " outside the resolved expansion");
    const Rational cn = cf.convergents[static_cast<std::size_t>(n_index)];
    const Rational cp = cf.convergents[static_cast<std::size_t>(n_index - 1)];
    // Convergent denominators must be resolved by the enclosure.
    if (1.0 / (static_cast<double>(cn.q) * static_cast<double>(cf.convergents[static_cast<std::size_t>(n_index) + 1].q)) <=
        2.0 * rho.radius)
        throw CombinatoricsViolation("denjoy: rho enclosure too wide for convergent " + cn.str());

    DenjoyFrame f{lift, t0, x, rho.value, rho.radius, cn, cp, cf.a[static_cast<std::size_t>(n_index) + 1], false};
    if (compare_to_rational(rho.value, cn) > 0) {  // q alpha - p > 0: reflect
        f.lift = lift.reflected();
        f.t0 = -t0;
        f.x = -x;
        f.alpha = -rho.value;
        f.conv = {-cn.p, cn.q};
        f.prev = {-cp.p, cp.q};
        f.reflected = true;
    }
    return f;
}

struct ReturnPartition {
    DenjoyFrame frame;
    DynInterval L;
    DynInterval K;
    std::vector<DynInterval> imagesL;  // f^j L(x), j = 0..q_n-1
    std::vector<DynInterval> imagesK;  // f^j K(x), j = 0..q_n-1
    DynInterval run;                   // union_{nu < a_{n+1}} f^{-nu q_n} L(x)
    double margin_L_disjoint = 0.0;
    double margin_K_disjoint = 0.0;    // over neighbours not sharing an orbit point
    double abut_K_error = 0.0;         // |gap| where f^j K ends at the start of f^{j+q_{n-1}} K
    double margin_run_in_K = 0.0;
    std::vector<double> run_points;    // F^{-nu q_n}(x) + nu p_n, nu = 0..a_{n+1}

    bool ok(double tol) const {
        return margin_L_disjoint > -tol && margin_K_disjoint > -tol && abut_K_error <= tol &&
               margin_run_in_K > -tol;
    }
};

inline ReturnPartition return_partition(const LiftDescriptor& lift, double t0, double x, int n_index,
                                        const DenjoyOptions& opt = {}) {
    ReturnPartition rp;
    rp.frame = make_frame(lift, t0, x, n_index, opt);
    const DenjoyFrame& fr = rp.frame;
    const FamilyPoint F = fr.base();
    const std::int64_t q = fr.conv.q, p = fr.conv.p;
    const std::int64_t qp = fr.prev.q, pp = fr.prev.p;

    OrbitSegment<double> fwd = iterate<double>(F, fr.x, q + qp);
    OrbitSegment<double> bwd = iterate<double>(F, fr.x, -q * fr.a_next);

    rp.L = {fr.x, bwd.points[static_cast<std::size_t>(q)] + static_cast<double>(p)};
    rp.K = {fr.x, fwd.points[static_cast<std::size_t>(qp)] - static_cast<double>(pp)};
    if (!(rp.L.length() > 0.0 && rp.L.length() < 1.0) || !(rp.K.length() > 0.0 && rp.K.length() < 1.0))
        throw CombinatoricsViolation("return_partition: L or K has invalid length");

    // f^j L(x) = [F^j x, F^{j-q} x + p]; F^{j-q} x is on the backward orbit for j <= q.
    for (std::int64_t j = 0; j < q; ++j) {
        double left = fwd.points[static_cast<std::size_t>(j)];
        double right = bwd.points[static_cast<std::size_t>(q - j)] + static_cast<double>(p);
        rp.imagesL.push_back({left, right});
        rp.imagesK.push_back({left, fwd.points[static_cast<std::size_t>(j + qp)] - static_cast<double>(pp)});
    }
    rp.margin_L_disjoint = disjoint_margin(rp.imagesL);
    // The closed arcs f^j K and f^{j+q_{n-1}} K share an endpoint; only their interiors are disjoint.
    rp.margin_K_disjoint = INFINITY;
    for (const auto& g : cyclic_gaps(rp.imagesK)) {
        if (static_cast<std::int64_t>(g.to) == static_cast<std::int64_t>(g.from) + qp)
            rp.abut_K_error = std::max(rp.abut_K_error, std::fabs(g.gap));
        else
            rp.margin_K_disjoint = std::min(rp.margin_K_disjoint, g.gap);
    }

    for (std::int64_t nu = 0; nu <= fr.a_next; ++nu)
        rp.run_points.push_back(bwd.points[static_cast<std::size_t>(nu * q)] + static_cast<double>(nu * p));
    rp.run = {fr.x, rp.run_points.back()};
    rp.margin_run_in_K = rp.K.right - rp.run.right;

    if (!rp.ok(opt.overlap_tol))
        throw CombinatoricsViolation("return_partition: disjointness/containment fails (margins " +
                                     std::to_string(rp.margin_L_disjoint) + ", " +
                                     std::to_string(rp.margin_K_disjoint) + ", abut " +
                                     std::to_string(rp.abut_K_error) + ", " +
                                     std::to_string(rp.margin_run_in_K) + ")");
    return rp;
}

struct DistortionRatio {
    double max_ratio = 1.0;
    double bound = 1.0;        // exp(M * sum_j |f^j J|)
    double total_length = 0.0;
    double margin = 0.0;       // disjointness margin of the iterates
    bool holds = true;
};

/// Max over a 64-point grid in J of (f_{t0}^n)'(x) / (f_{t0}^n)'(y), against exp(M sum |f^j J|).
inline DistortionRatio distortion_ratio_check(const LiftDescriptor& lift, double t0, const DynInterval& J,
                                              std::int64_t n, double overlap_tol = 1e-12, int grid = 64) {
    if (n < 1) throw DomainError("distortion_ratio_check: n must be >= 1");
    const FamilyPoint F{lift, t0};
    OrbitSegment<double> a = iterate<double>(F, J.left, n);
    OrbitSegment<double> b = iterate<double>(F, J.right, n);
    std::vector<DynInterval> images;
    DistortionRatio r;
    for (std::int64_t j = 0; j < n; ++j) {
        DynInterval im{a.points[static_cast<std::size_t>(j)], b.points[static_cast<std::size_t>(j)]};
        r.total_length += im.length();
        images.push_back(im);
    }
    r.margin = disjoint_margin(images);
    if (r.margin < -overlap_tol)
        throw PreconditionFailed("distortion_ratio_check: iterates of J overlap (margin " +
                                 std::to_string(r.margin) + ")");
    double lo = INFINITY, hi = -INFINITY;
    for (int i = 0; i < grid; ++i) {
        double y = J.left + J.length() * i / (grid - 1);
        double s = 0.0;
        for (std::int64_t j = 0; j < n; ++j) {
            s += std::log(F.deriv(y));
            y = F.value(y);
        }
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    r.max_ratio = std::exp(hi - lo);
    r.bound = std::exp(distortion_constants(lift).M * r.total_length);
    r.holds = r.max_ratio <= r.bound * (1.0 + 1e-12);
    return r;
}

struct ChainIntervals {
    double t = 0.0;  // distance from t0 to the p/q plateau (working orientation)
    std::int64_t q = 0;
    std::vector<DynInterval> I;      // I_i(x), i = 1..q
    std::vector<DynInterval> images; // f^{q-i} I_i(x)
    std::vector<double> tau;         // lengths of images
    DynInterval hatL;
    double hat_ell = 0.0;
    double abut_error = 0.0;         // max gap between consecutive images
    double telescoping_error = 0.0;  // |sum tau - (F_t^q x - F^q x)|
    double containment_margin = 0.0; // x + p - F_t^q(x), >= 0 up to solver tolerance
    double min_tau_ratio = INFINITY; // min_i tau_i / ((f^{q-i})'(f^i x) |I_i|)
};

namespace detail {

// l^(y) for base point y in the working orientation.
inline double hat_ell_at(const FamilyPoint& F, double t, std::int64_t q, double y, DynInterval* hat_l = nullptr) {
    FamilyPoint Ft{F.lift, F.t + t};
    double c = iterate_point<double>(Ft, y, q);
    OrbitSegment<double> back = iterate<double>(F, c, -q);  // e_k = F^{-k}(c)
    OrbitSegment<double> fwd = iterate<double>(F, y, q);
    std::vector<DynInterval> arcs;
    for (std::int64_t j = 1; j <= q; ++j)
        arcs.push_back({fwd.points[static_cast<std::size_t>(j)], back.points[static_cast<std::size_t>(q - j)]});
    if (hat_l) *hat_l = {y, back.points[static_cast<std::size_t>(q)]};
    return union_measure(arcs);
}

}  // namespace detail

inline ChainIntervals chain_intervals(const DenjoyFrame& fr, double t) {
    const FamilyPoint F = fr.base();
    const FamilyPoint Ft{fr.lift, fr.t0 + t};
    const std::int64_t q = fr.conv.q;
    ChainIntervals ch;
    ch.t = t;
    ch.q = q;
    OrbitSegment<double> c = iterate<double>(Ft, fr.x, q);   // F_t^i x
    OrbitSegment<double> a = iterate<double>(F, fr.x, q);    // F^i x, with derivatives
    for (std::int64_t i = 1; i <= q; ++i) {
        double left = F.value(c.points[static_cast<std::size_t>(i - 1)]);
        double right = c.points[static_cast<std::size_t>(i)];
        ch.I.push_back({left, right});
        double l = left, r = right;
        for (std::int64_t j = 0; j < q - i; ++j) {
            l = F.value(l);
            r = F.value(r);
        }
        ch.images.push_back({l, r});
        ch.tau.push_back(r - l);
        double growth = a.derivs[static_cast<std::size_t>(q)] / a.derivs[static_cast<std::size_t>(i)];
        ch.min_tau_ratio = std::min(ch.min_tau_ratio, (r - l) / (growth * (right - left)));
    }
    for (std::size_t i = 0; i + 1 < ch.images.size(); ++i)
        ch.abut_error = std::max(ch.abut_error, std::fabs(ch.images[i + 1].left - ch.images[i].right));
    double sum = 0.0;
    for (double v : ch.tau) sum += v;
    ch.telescoping_error = std::fabs(sum - (c.points.back() - a.points.back()));
    ch.containment_margin = fr.x + static_cast<double>(fr.conv.p) - c.points.back();
    ch.hat_ell = detail::hat_ell_at(F, t, q, fr.x, &ch.hatL);
    return ch;
}

struct HatEllCheck {
    ReturnPartition partition;
    ChainIntervals chain;
    double t_left = 0.0;        // plateau end (working orientation)
    double hat_ell = 0.0;       // max over sampled base points
    double hat_ell_x = 0.0;     // at the given base point
    double quotient = 0.0;      // (p/q - alpha) / t
    double uncertainty = 0.0;   // alpha radius / t
    double M = 0.0;
    double N = 0.0;
    double bound = 0.0;         // exp(-M hat_ell)
    double bound_eM = 0.0;      // exp(-M)
    bool holds = false;         // quotient + uncertainty >= bound
    // Comparison chain along the run x_nu = f^{-nu q_n} x, nu < a_{n+1}.
    std::vector<double> run_hat_ell;
    double run_sum = 0.0;       // <= 1
    double max_comparison = 0.0; // max_nu l^(x) / l^(x_nu), <= e^N
    bool run_sum_ok = false;
    bool comparison_ok = false;
    bool scaled_ok = false;     // a_{n+1} l^(x) <= e^N
    bool tau_ok = false;        // tau_i >= e^{-M l^(x)} (f^{q-i})'(f^i x) |I_i|
};

inline HatEllCheck hat_ell_bound_check(const LiftDescriptor& lift, double t0, double x, int n_index,
                                       const DenjoyOptions& opt = {}) {
    HatEllCheck h;
    h.partition = return_partition(lift, t0, x, n_index, opt);
    const DenjoyFrame& fr = h.partition.frame;
    const FamilyPoint F = fr.base();

    Plateau pl = plateau_endpoints(fr.lift, fr.conv, opt.plateau_tol);
    h.t_left = pl.t_left;
    const double t = pl.t_left - fr.t0;
    if (!(t > 0.0)) throw PreconditionFailed("hat_ell_bound_check: plateau not to the right of t0");
    h.chain = chain_intervals(fr, t);
    if (h.chain.containment_margin < -opt.containment_tol)
        throw CombinatoricsViolation("hat_ell_bound_check: chain leaves f^q L(x) by " +
                                     std::to_string(-h.chain.containment_margin));

    DistortionConstants dc = distortion_constants(fr.lift);
    h.M = dc.M;
    h.N = dc.N;
    const std::int64_t q = fr.conv.q;
    h.hat_ell_x = h.chain.hat_ell;
    h.hat_ell = h.hat_ell_x;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int s = 0; s < opt.samples; ++s) h.hat_ell = std::max(h.hat_ell, detail::hat_ell_at(F, t, q, U(rng)));

    h.quotient = (fr.conv.value() - fr.alpha) / t;
    h.uncertainty = fr.alpha_radius / t;
    h.bound = std::exp(-h.M * h.hat_ell);
    h.bound_eM = std::exp(-h.M);
    h.holds = h.quotient + h.uncertainty >= h.bound;
    h.tau_ok = h.chain.min_tau_ratio >= std::exp(-h.M * h.hat_ell_x) * (1.0 - 1e-9);

    const auto& pts = h.partition.run_points;
    h.run_sum = 0.0;
    h.max_comparison = 0.0;
    for (std::int64_t nu = 0; nu < fr.a_next; ++nu) {
        double v = nu == 0 ? h.hat_ell_x : detail::hat_ell_at(F, t, q, pts[static_cast<std::size_t>(nu)]);
        h.run_hat_ell.push_back(v);
        h.run_sum += v;
        if (nu > 0) h.max_comparison = std::max(h.max_comparison, h.hat_ell_x / v);
    }
    h.run_sum_ok = h.run_sum <= 1.0 + 1e-12;
    h.comparison_ok = h.max_comparison <= std::exp(h.N) * (1.0 + 1e-12);
    h.scaled_ok = static_cast<double>(fr.a_next) * h.hat_ell_x <= std::exp(h.N);
    return h;
}

}  // namespace rotascope
