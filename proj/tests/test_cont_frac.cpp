#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "rotascope/cont_frac.hpp"

using namespace rotascope;

namespace {

// min_{p} |q alpha - p| for exact alpha.
BigRational distance_to_integer(const BigRational& qa) {
    BigInt fl = detail::floor_big(boost::multiprecision::numerator(qa), boost::multiprecision::denominator(qa));
    BigRational f = qa - BigRational(fl);
    return f < BigRational(1, 2) ? f : BigRational(1) - f;
}

// p/q is a convergent iff it is a best approximation of the second kind:
// |q alpha - p| < |q' alpha - p'| for every q' < q (valid for q >= 2).
bool best_second_kind(const BigRational& alpha, std::int64_t p, std::int64_t q) {
    BigRational own = BigRational(q) * alpha - BigRational(p);
    if (own < 0) own = -own;
    for (std::int64_t k = 1; k < q; ++k)
        if (distance_to_integer(BigRational(k) * alpha) <= own) return false;
    return true;
}

}  // namespace

TEST(Rational, Normalizes) {
    auto r = Rational::make(6, -8);
    EXPECT_EQ(r.p, -3);
    EXPECT_EQ(r.q, 4);
    EXPECT_THROW(Rational::make(1, 0), DomainError);
    EXPECT_LT(Rational::make(1, 3), Rational::make(1, 2));
    EXPECT_EQ(mediant({1, 2}, {2, 3}), (Rational{3, 5}));
}

TEST(CircleDistance, Examples) {
    EXPECT_NEAR(circle_distance(0.7), 0.3, 1e-15);
    EXPECT_EQ(circle_distance(0.25), 0.25);
    EXPECT_EQ(circle_distance(3.0), 0.0);
    EXPECT_NEAR(circle_distance(-0.1), 0.1, 1e-15);
}

TEST(ContinuedFraction, GoldenMeanIsFibonacci) {
    auto cf = continued_fraction((std::sqrt(5.0) - 1.0) / 2.0, 10);
    ASSERT_GE(cf.a.size(), 7u);
    EXPECT_EQ(cf.a[0], 0);
    for (std::size_t k = 1; k < cf.a.size(); ++k) EXPECT_EQ(cf.a[k], 1);
    std::vector<Rational> want{{0, 1}, {1, 1}, {1, 2}, {2, 3}, {3, 5}, {5, 8}, {8, 13}};
    for (std::size_t k = 0; k < want.size(); ++k) EXPECT_EQ(cf.convergents[k], want[k]);
}

TEST(ContinuedFraction, ExactRationalTerminates) {
    auto cf = continued_fraction(Rational{3, 4}, 10);
    EXPECT_TRUE(cf.exact);
    EXPECT_EQ(cf.a, (std::vector<std::int64_t>{0, 1, 3}));
    auto pi = continued_fraction(Rational{355, 113}, 10);
    EXPECT_EQ(pi.a, (std::vector<std::int64_t>{3, 7, 16}));
}

TEST(ContinuedFraction, PiFromDouble) {
    auto cf = continued_fraction(std::numbers::pi, 20);
    EXPECT_FALSE(cf.exact);
    std::vector<std::int64_t> head{3, 7, 15, 1, 292, 1, 1, 1, 2, 1, 3};
    ASSERT_GE(cf.a.size(), head.size());
    for (std::size_t k = 0; k < head.size(); ++k) EXPECT_EQ(cf.a[k], head[k]);
}

TEST(ContinuedFraction, QuadraticIrrationalsExact) {
    auto g = continued_fraction(QuadraticIrrational::golden(), 40);
    for (std::size_t k = 1; k < g.a.size(); ++k) EXPECT_EQ(g.a[k], 1);
    EXPECT_EQ(g.a.size(), 40u);
    auto s = continued_fraction(QuadraticIrrational::sqrt2_minus_1(), 30);
    EXPECT_EQ(s.a[0], 0);
    for (std::size_t k = 1; k < s.a.size(); ++k) EXPECT_EQ(s.a[k], 2);
    std::vector<Rational> want{{0, 1}, {1, 2}, {2, 5}, {5, 12}, {12, 29}};
    for (std::size_t k = 0; k < want.size(); ++k) EXPECT_EQ(s.convergents[k], want[k]);
}

TEST(ContinuedFraction, RecurrenceAndApproximationInvariants) {
    for (auto x : {QuadraticIrrational::golden(), QuadraticIrrational::sqrt2_minus_1()}) {
        auto cf = continued_fraction(x, 30);
        const long double alpha = (std::sqrt(static_cast<long double>(x.D)) + x.P) / x.Q;
        for (std::size_t k = 2; k < cf.a.size(); ++k) {
            EXPECT_EQ(cf.convergents[k].p, cf.a[k] * cf.convergents[k - 1].p + cf.convergents[k - 2].p);
            EXPECT_EQ(cf.convergents[k].q, cf.a[k] * cf.convergents[k - 1].q + cf.convergents[k - 2].q);
            EXPECT_GT(cf.convergents[k].q, cf.convergents[k - 1].q);
        }
        for (std::size_t k = 0; k + 1 < 14; ++k) {
            long double err = std::fabs(cf.convergents[k].q * alpha - cf.convergents[k].p);
            EXPECT_LT(err, 1.0L / cf.convergents[k + 1].q);
        }
    }
}

TEST(ContinuedFraction, DoubleDoubleReachesDeeper) {
    // sqrt(5) to double-double accuracy by one Newton step from the binary64 root.
    DoubleDouble r = std::sqrt(5.0);
    r = r + (DoubleDouble(5.0) - r * r) / (DoubleDouble(2.0) * r);
    DoubleDouble g = (r - DoubleDouble(1.0)) / DoubleDouble(2.0);
    auto dd = continued_fraction(g, 100);
    auto d = continued_fraction((std::sqrt(5.0) - 1.0) / 2.0, 100);
    EXPECT_GT(dd.a.size(), d.a.size() + 10);
    for (std::size_t k = 1; k < dd.a.size(); ++k) EXPECT_EQ(dd.a[k], 1) << k;
}

TEST(ClosestReturns, Examples) {
    auto g = closest_returns((std::sqrt(5.0) - 1.0) / 2.0, 20);
    std::vector<std::int64_t> qs;
    for (auto& r : g) qs.push_back(r.q);
    EXPECT_EQ(qs, (std::vector<std::int64_t>{1, 2, 3, 5, 8, 13}));
    for (std::size_t i = 0; i + 1 < g.size(); ++i) EXPECT_EQ(g[i].sign, -g[i + 1].sign);

    auto pi = closest_returns(1.0 / std::numbers::pi, 30);
    qs.clear();
    for (auto& r : pi) qs.push_back(r.q);
    EXPECT_EQ(qs, (std::vector<std::int64_t>{1, 3, 22}));

    auto half = closest_returns(0.5 - 1e-9, 10);
    qs.clear();
    for (auto& r : half) qs.push_back(r.q);
    EXPECT_EQ(qs, (std::vector<std::int64_t>{1, 2}));
}

TEST(ClosestReturns, BruteForceOracleAgainstDefinition) {
    // Independent check of the definition |j alpha| > |q alpha| for 0 < j < q.
    const double alpha = 1.0 / std::numbers::pi;
    auto got = closest_returns(alpha, 400);
    std::vector<std::int64_t> want;
    for (std::int64_t q = 1; q <= 400; ++q) {
        bool ok = true;
        for (std::int64_t j = 1; j < q && ok; ++j)
            ok = circle_distance(j * alpha) > circle_distance(q * alpha);
        if (ok) want.push_back(q);
    }
    std::vector<std::int64_t> qs;
    for (auto& r : got) qs.push_back(r.q);
    EXPECT_EQ(qs, want);
}

TEST(ClosestReturns, DirectAndConvergentPathsAgree) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        double alpha = U(rng);
        EXPECT_EQ(detail::closest_returns_direct(alpha, 10'000), detail::closest_returns_convergent(alpha, 10'000))
            << alpha;
    }
}

TEST(ClosestReturns, LargeQUsesConvergents) {
    auto g = closest_returns((std::sqrt(5.0) - 1.0) / 2.0, 100'000);
    EXPECT_EQ(g.back().q, 75025);
    EXPECT_THROW(closest_returns(0.1, 0), DomainError);
    // Exact rational: the expansion terminates at q = 2 and that is not degenerate.
    auto h = closest_returns(0.5, 1'000'000);
    EXPECT_EQ(h.back().q, 2);
}

TEST(ConvergentTest, Examples) {
    auto g = convergent_test((std::sqrt(5.0) - 1.0) / 2.0, {5, 8}, 3.5);
    EXPECT_FALSE(g.holds_hypothesis);
    EXPECT_TRUE(g.implication_ok);

    auto h = convergent_test(0.5 + 1.0 / 512.0, {1, 2}, 3.5);
    EXPECT_TRUE(h.holds_hypothesis);
    EXPECT_TRUE(h.is_convergent);

    // Truncated Liouville constant 10^-1 + 10^-2 + 10^-6 + 10^-24, exactly.
    BigInt ten = 10;
    BigRational alpha = BigRational(1, 10) + BigRational(1, 100) + BigRational(1, 1'000'000) +
                        BigRational(BigInt(1), boost::multiprecision::pow(ten, 24));
    auto l = convergent_test(alpha, {110001, 1'000'000}, 3.5);
    EXPECT_TRUE(l.holds_hypothesis);
    EXPECT_TRUE(l.is_convergent);

    EXPECT_THROW(convergent_test(0.3, {0, 1}, 3.5), DomainError);
    EXPECT_THROW(convergent_test(0.3, {1, 3}, 3.0), DomainError);
}

TEST(ConvergentTest, ImplicationHoldsOnRandomInstances) {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::int64_t> Q(2, 40);
    std::uniform_real_distribution<double> D(3.0001, 6.0), U(-1.5, 1.5);
    int hypothesis_true = 0;
    for (int i = 0; i < 1000; ++i) {
        std::int64_t q = Q(rng);
        std::uniform_int_distribution<std::int64_t> P(0, q);
        Rational pq = Rational::make(P(rng), q);
        if (pq.q < 2) continue;
        double d = D(rng);
        // alpha = p/q + u q^{-d}, exact in rationals; |u| < 1 makes the hypothesis hold.
        double offset = U(rng) * std::pow(static_cast<double>(pq.q), -d);
        BigRational alpha = BigRational(pq.p, pq.q) + detail::to_big(offset);
        auto r = convergent_test(alpha, pq, d);
        EXPECT_TRUE(r.implication_ok) << pq.str() << " d=" << d;
        if (r.holds_hypothesis) {
            ++hypothesis_true;
            EXPECT_TRUE(best_second_kind(alpha, pq.p, pq.q)) << pq.str();
        }
        if (offset != 0.0) {
            EXPECT_EQ(r.is_convergent, best_second_kind(alpha, pq.p, pq.q)) << pq.str();
        }
    }
    EXPECT_GT(hypothesis_true, 300);
}
